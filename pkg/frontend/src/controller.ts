import type { ApiClient } from "./api.js";
import type { LabelDimsParams, LabelOptions, PlacementsDoc } from "./types.js";
import type { ScheduleMode, SchedulerHooks } from "./debounce.js";
import { RequestScheduler } from "./debounce.js";
import type { ViewState } from "./viewport.js";
import { panBy, resize, toRequestViewport, zoomAt } from "./viewport.js";

export interface ControllerEvents {
  /** A response for viewport version `version` became the newest shown frame. */
  onFrame(doc: PlacementsDoc, version: number): void;
  /** The request for the current viewport failed; the last good frame stays up. */
  onError(err: Error): void;
}

export interface ControllerOptions {
  labelDims: LabelDimsParams;
  requestOptions?: LabelOptions;
  delayMs?: number;
  hooks?: SchedulerHooks;
  /** Overlapping in-flight requests allowed before firings are deferred. */
  maxInFlight?: number;
}

/**
 * Single-threaded orchestration of gestures and service requests.
 *
 * Every gesture bumps a monotone viewport version. A response is applied
 * only when its request's version is newer than the newest version already
 * applied, so an out-of-order response (an older request finishing after a
 * newer one) is discarded instead of overwriting the newer frame, and once
 * a gesture burst settles the frame shown is exactly the final viewport's.
 * No labeling decisions happen here: the document is handed to the
 * renderer verbatim.
 */
export class ViewerController {
  private view: ViewState;
  private version = 0;
  private firedVersion = -1;
  private appliedVersion = -1;
  private inFlight = 0;
  private lastGoodDoc: PlacementsDoc | null = null;
  private readonly scheduler: RequestScheduler;
  private readonly maxInFlight: number;

  constructor(
    private readonly api: ApiClient,
    private readonly datasetId: string,
    initialView: ViewState,
    private readonly options: ControllerOptions,
    private readonly events: ControllerEvents,
  ) {
    this.view = initialView;
    this.maxInFlight = options.maxInFlight ?? 2;
    this.scheduler = new RequestScheduler(() => this.fireRequest(), options.delayMs ?? 50, options.hooks);
  }

  getView(): ViewState {
    return this.view;
  }

  getVersion(): number {
    return this.version;
  }

  lastGood(): PlacementsDoc | null {
    return this.lastGoodDoc;
  }

  setMode(mode: ScheduleMode): void {
    this.scheduler.setMode(mode);
  }

  pan(dxPx: number, dyPx: number): void {
    this.view = panBy(this.view, dxPx, dyPx);
    this.bump();
  }

  zoom(factor: number, cxPx: number, cyPx: number): void {
    this.view = zoomAt(this.view, factor, cxPx, cyPx);
    this.bump();
  }

  setSize(width: number, height: number): void {
    this.view = resize(this.view, width, height);
    this.bump();
  }

  /** Request the current viewport immediately (initial load, manual reload). */
  refresh(): void {
    this.version++;
    this.fireRequest();
  }

  /** True while any request is unanswered. */
  busy(): boolean {
    return this.inFlight > 0;
  }

  dispose(): void {
    this.scheduler.cancel();
  }

  private bump(): void {
    this.version++;
    this.scheduler.request();
  }

  private fireRequest(): void {
    if (this.firedVersion === this.version) return; // current viewport already requested
    if (this.inFlight >= this.maxInFlight) return; // settle() re-fires when one lands
    const version = this.version;
    this.firedVersion = version;
    this.inFlight++;
    this.api
      .label({
        dataset_id: this.datasetId,
        viewport: toRequestViewport(this.view),
        label_dims: this.options.labelDims,
        ...(this.options.requestOptions ? { options: this.options.requestOptions } : {}),
      })
      .then(
        (doc) => this.settle(version, doc, null),
        (err) => this.settle(version, null, err instanceof Error ? err : new Error(String(err))),
      );
  }

  private settle(version: number, doc: PlacementsDoc | null, err: Error | null): void {
    this.inFlight--;
    if (doc !== null) {
      if (version > this.appliedVersion) {
        this.appliedVersion = version;
        this.lastGoodDoc = doc;
        this.events.onFrame(doc, version);
      }
    } else if (version === this.version && err !== null) {
      // Failures of already-superseded requests are not worth a banner.
      this.events.onError(err);
    }
    if (this.firedVersion < this.version) this.fireRequest(); // catch up to the newest gesture
  }
}
