import type { PlacementEntry, PlacementsDoc } from "./types.js";

/**
 * Structural subset of CanvasRenderingContext2D used by the renderer, so
 * tests can substitute a recording context without a DOM.
 */
export interface Ctx2D {
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  globalAlpha: number;
  lineWidth: number;
  font: string;
  textBaseline: CanvasTextBaseline;
  save(): void;
  restore(): void;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  fill(): void;
  stroke(): void;
  fillText(text: string, x: number, y: number): void;
}

export interface RenderOptions {
  showGrid?: boolean;
}

const COLORS = {
  background: "#fafaf7",
  grid: "#dcd9d0",
  labelFill: "#fff3c4",
  labelBorder: "#b8860b",
  labelText: "#3a3a3a",
  dot: "#1f4e79",
  freeDot: "#8a8a8a",
};

/** Dot strictly inside a rect. A label's own anchor sits ON its rect
 * boundary, so a labeled feature never counts as obscured by itself. */
function covered(p: { x: number; y: number }, rects: PlacementEntry[]): boolean {
  for (const e of rects) {
    const r = e.rect!;
    if (p.x > r.left && p.x < r.left + r.width && p.y > r.top && p.y < r.top + r.height) {
      return true;
    }
  }
  return false;
}

/**
 * Draw one service response verbatim: label rectangles with their text,
 * a dot per visible feature, and dimmed dots for features whose point is
 * covered by someone's label. Rect geometry is never adjusted here; the
 * service already guarantees pairwise disjoint labels.
 */
export function renderScene(ctx: Ctx2D, doc: PlacementsDoc, opts: RenderOptions = {}): void {
  const W = doc.viewport.width;
  const H = doc.viewport.height;
  ctx.save();
  ctx.globalAlpha = 1;
  ctx.clearRect(0, 0, W, H);
  ctx.fillStyle = COLORS.background;
  ctx.fillRect(0, 0, W, H);

  if (opts.showGrid) drawGrid(ctx, doc);

  const labeled = doc.placements.filter((p) => p.candidate_index !== null && p.rect);

  ctx.fillStyle = COLORS.labelFill;
  for (const p of labeled) {
    const r = p.rect!;
    ctx.fillRect(r.left, r.top, r.width, r.height);
  }
  ctx.strokeStyle = COLORS.labelBorder;
  ctx.lineWidth = 0.5;
  for (const p of labeled) {
    const r = p.rect!;
    ctx.strokeRect(r.left, r.top, r.width, r.height);
  }

  ctx.fillStyle = COLORS.labelText;
  ctx.textBaseline = "middle";
  for (const p of labeled) {
    const r = p.rect!;
    const fontPx = Math.min(14, Math.max(4, r.height - 3));
    ctx.font = `${fontPx}px sans-serif`;
    ctx.fillText(p.text, r.left + 2, r.top + r.height / 2);
  }

  for (const p of doc.placements) {
    if (!p.point) continue; // off-screen
    const labeledSelf = p.candidate_index !== null;
    ctx.globalAlpha = !labeledSelf && covered(p.point, labeled) ? 0.25 : 1;
    ctx.fillStyle = labeledSelf ? COLORS.dot : COLORS.freeDot;
    ctx.beginPath();
    ctx.arc(p.point.x, p.point.y, 1.8, 0, Math.PI * 2);
    ctx.fill();
  }

  ctx.restore();
}

/** Bucket-grid overlay: cells are half the conflict-test label size. */
function drawGrid(ctx: Ctx2D, doc: PlacementsDoc): void {
  const overlap = Number(doc.options["allowed_overlap_pct"] ?? 0);
  const shrink = 1 - overlap / 100;
  const cellW = (doc.label_dims.width * shrink) / 2;
  const cellH = (doc.label_dims.height * shrink) / 2;
  const W = doc.viewport.width;
  const H = doc.viewport.height;
  if (cellW <= 1 || cellH <= 1) return; // sub-pixel cells, nothing useful to draw
  ctx.strokeStyle = COLORS.grid;
  ctx.lineWidth = 0.5;
  ctx.beginPath();
  for (let x = cellW; x < W; x += cellW) {
    ctx.moveTo(x, 0);
    ctx.lineTo(x, H);
  }
  for (let y = cellH; y < H; y += cellH) {
    ctx.moveTo(0, y);
    ctx.lineTo(W, y);
  }
  ctx.stroke();
}
