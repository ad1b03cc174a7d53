import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";
import { RequestScheduler } from "../src/debounce.js";

describe("RequestScheduler debounce mode", () => {
  beforeEach(() => vi.useFakeTimers());
  afterEach(() => vi.useRealTimers());

  it("fires once, 50ms after the last request of a burst", () => {
    const fire = vi.fn();
    const s = new RequestScheduler(fire);
    s.request();
    vi.advanceTimersByTime(30);
    s.request();
    vi.advanceTimersByTime(30);
    s.request();
    expect(fire).not.toHaveBeenCalled();
    vi.advanceTimersByTime(49);
    expect(fire).not.toHaveBeenCalled();
    vi.advanceTimersByTime(1);
    expect(fire).toHaveBeenCalledTimes(1);
    vi.advanceTimersByTime(500);
    expect(fire).toHaveBeenCalledTimes(1);
  });

  it("honors a custom delay", () => {
    const fire = vi.fn();
    const s = new RequestScheduler(fire, 5);
    s.request();
    vi.advanceTimersByTime(5);
    expect(fire).toHaveBeenCalledTimes(1);
  });

  it("flush fires a pending request immediately and is a no-op when idle", () => {
    const fire = vi.fn();
    const s = new RequestScheduler(fire);
    s.flush();
    expect(fire).not.toHaveBeenCalled();
    s.request();
    s.flush();
    expect(fire).toHaveBeenCalledTimes(1);
    vi.advanceTimersByTime(200);
    expect(fire).toHaveBeenCalledTimes(1);
  });

  it("cancel drops the pending firing", () => {
    const fire = vi.fn();
    const s = new RequestScheduler(fire);
    s.request();
    s.cancel();
    vi.advanceTimersByTime(200);
    expect(fire).not.toHaveBeenCalled();
  });
});

describe("RequestScheduler frame mode", () => {
  it("coalesces to one firing per frame tick", () => {
    const frames: Array<() => void> = [];
    const fire = vi.fn();
    const s = new RequestScheduler(fire, 50, {
      requestFrame: (cb) => {
        frames.push(cb);
        return frames.length;
      },
      cancelFrame: () => {},
    });
    s.setMode("frame");
    s.request();
    s.request();
    s.request();
    expect(frames).toHaveLength(1); // three requests, one scheduled callback
    frames[0]!();
    expect(fire).toHaveBeenCalledTimes(1);
    s.request();
    expect(frames).toHaveLength(2); // next frame scheduled only after the first ran
  });

  it("switching modes carries a pending request over", () => {
    vi.useFakeTimers();
    const frames: Array<() => void> = [];
    const fire = vi.fn();
    const s = new RequestScheduler(fire, 50, {
      requestFrame: (cb) => {
        frames.push(cb);
        return frames.length;
      },
      cancelFrame: () => {},
    });
    s.request(); // pending in debounce mode
    s.setMode("frame");
    expect(frames).toHaveLength(1);
    frames[0]!();
    expect(fire).toHaveBeenCalledTimes(1);
    vi.advanceTimersByTime(500); // the cancelled debounce timer must not also fire
    expect(fire).toHaveBeenCalledTimes(1);
    vi.useRealTimers();
  });
});
