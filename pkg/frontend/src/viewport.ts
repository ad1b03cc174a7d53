import type { ViewportParams } from "./types.js";

/**
 * Viewport state, matching the service's projection
 *
 *   screen_x = (world_x - pan_x) * zoom * width
 *   screen_y = (world_y - pan_y) * zoom * height
 *
 * so the visible world slice is [pan_x, pan_x + 1/zoom) on each axis.
 * The viewer only composes pan/zoom parameters; all projection of actual
 * features happens server-side.
 */
export interface ViewState {
  width: number;
  height: number;
  panX: number;
  panY: number;
  zoom: number;
}

export function initialView(width: number, height: number): ViewState {
  return { width, height, panX: 0, panY: 0, zoom: 1 };
}

/** Drag the content by a screen-pixel delta (content follows the cursor). */
export function panBy(v: ViewState, dxPx: number, dyPx: number): ViewState {
  return {
    ...v,
    panX: v.panX - dxPx / (v.zoom * v.width),
    panY: v.panY - dyPx / (v.zoom * v.height),
  };
}

/** Zoom by a factor keeping the world point under (cxPx, cyPx) fixed. */
export function zoomAt(v: ViewState, factor: number, cxPx: number, cyPx: number): ViewState {
  const zoom = v.zoom * factor;
  return {
    ...v,
    zoom,
    panX: v.panX + (cxPx / v.width) * (1 / v.zoom - 1 / zoom),
    panY: v.panY + (cyPx / v.height) * (1 / v.zoom - 1 / zoom),
  };
}

export function resize(v: ViewState, width: number, height: number): ViewState {
  return { ...v, width, height };
}

export function toRequestViewport(v: ViewState): ViewportParams {
  return { width: v.width, height: v.height, pan_x: v.panX, pan_y: v.panY, zoom: v.zoom };
}
