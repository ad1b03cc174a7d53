export type ScheduleMode = "debounce" | "frame";

export interface SchedulerHooks {
  setTimer?: (cb: () => void, ms: number) => unknown;
  clearTimer?: (id: unknown) => void;
  requestFrame?: (cb: () => void) => unknown;
  cancelFrame?: (id: unknown) => void;
}

/**
 * Coalesces gesture events into request firings.
 *
 * "debounce" mode (the default, 50ms) fires once per gesture pause: every
 * request() restarts the timer, so a continuous drag produces one firing
 * 50ms after it ends. "frame" mode fires at most once per animation frame
 * while requests keep arriving, which exercises relabeling at interactive
 * rates without flooding the service faster than it can answer.
 */
export class RequestScheduler {
  private mode: ScheduleMode = "debounce";
  private timerId: unknown = null;
  private frameId: unknown = null;
  private readonly setTimer: (cb: () => void, ms: number) => unknown;
  private readonly clearTimer: (id: unknown) => void;
  private readonly requestFrame: (cb: () => void) => unknown;
  private readonly cancelFrame: (id: unknown) => void;

  constructor(
    private readonly fire: () => void,
    private readonly delayMs: number = 50,
    hooks: SchedulerHooks = {},
  ) {
    this.setTimer = hooks.setTimer ?? ((cb, ms) => setTimeout(cb, ms));
    this.clearTimer = hooks.clearTimer ?? ((id) => clearTimeout(id as never));
    this.requestFrame =
      hooks.requestFrame ??
      (typeof requestAnimationFrame === "function"
        ? (cb) => requestAnimationFrame(() => cb())
        : (cb) => setTimeout(cb, 16));
    this.cancelFrame =
      hooks.cancelFrame ??
      (typeof cancelAnimationFrame === "function"
        ? (id) => cancelAnimationFrame(id as never)
        : (id) => clearTimeout(id as never));
  }

  getMode(): ScheduleMode {
    return this.mode;
  }

  setMode(mode: ScheduleMode): void {
    if (mode === this.mode) return;
    const pending = this.timerId !== null || this.frameId !== null;
    this.cancel();
    this.mode = mode;
    if (pending) this.request();
  }

  request(): void {
    if (this.mode === "debounce") {
      if (this.timerId !== null) this.clearTimer(this.timerId);
      this.timerId = this.setTimer(() => {
        this.timerId = null;
        this.fire();
      }, this.delayMs);
    } else {
      if (this.frameId !== null) return; // already due this frame
      this.frameId = this.requestFrame(() => {
        this.frameId = null;
        this.fire();
      });
    }
  }

  /** Fire a pending request immediately instead of waiting out the delay. */
  flush(): void {
    if (this.timerId === null && this.frameId === null) return;
    this.cancel();
    this.fire();
  }

  cancel(): void {
    if (this.timerId !== null) {
      this.clearTimer(this.timerId);
      this.timerId = null;
    }
    if (this.frameId !== null) {
      this.cancelFrame(this.frameId);
      this.frameId = null;
    }
  }
}
