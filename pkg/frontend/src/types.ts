// Wire types for the labeling service. These mirror the service's JSON
// schema exactly; the viewer never invents fields of its own.

export interface ViewportParams {
  width: number;
  height: number;
  pan_x: number;
  pan_y: number;
  zoom: number;
}

export interface LabelDimsParams {
  width: number;
  height: number;
}

export interface LabelOptions {
  priority_threshold?: number | null;
  allowed_overlap_pct?: number;
  prox_weight?: number;
  preference_order?: [number, number, number, number];
  spread_values?: boolean;
}

export interface LabelRequest {
  dataset_id: string;
  viewport: ViewportParams;
  label_dims: LabelDimsParams;
  options?: LabelOptions;
}

export interface PlacementRect {
  left: number;
  top: number;
  width: number;
  height: number;
}

export interface PlacementEntry {
  id: number;
  rank: number;
  text: string;
  /** Screen position of the feature dot; absent for off-screen features. */
  point?: { x: number; y: number };
  /** Corner index 0..3 when labeled, null otherwise. */
  candidate_index: number | null;
  rect?: PlacementRect;
  reason?: string;
}

export interface RunMetrics {
  n_input: number;
  n_visible: number;
  features_processed: number;
  labels_placed: number;
  anomaly_count: number;
  anomaly_rate: number;
  elapsed_ms: number;
  /** Labeled fraction per priority decile, best decile first. */
  histogram: number[];
}

export interface PlacementsDoc {
  viewport: ViewportParams;
  label_dims: LabelDimsParams;
  options: Record<string, unknown>;
  placements: PlacementEntry[];
  metrics: RunMetrics;
}

export interface UploadResult {
  dataset_id: string;
  n: number;
  warnings: string[];
}

export interface DatasetMeta {
  n: number;
  bounds: { min_x: number; min_y: number; max_x: number; max_y: number } | null;
  rank_range: { min: number; max: number } | null;
}
