import type { Ctx2D } from "./render.js";

/**
 * Decile quality panel: ten bars, one per priority decile of the input,
 * best-priority decile leftmost, bar height = labeled fraction of that
 * decile. Redraw on every frame keeps it live.
 */
export function renderHistogram(
  ctx: Ctx2D,
  histogram: number[],
  width: number,
  height: number,
): void {
  const pad = 2;
  const baseline = height - pad;
  const usable = baseline - pad;
  ctx.save();
  ctx.globalAlpha = 1;
  ctx.clearRect(0, 0, width, height);
  ctx.fillStyle = "#fafaf7";
  ctx.fillRect(0, 0, width, height);

  const n = histogram.length;
  const slot = width / n;
  const barW = Math.max(1, slot - 2);
  ctx.fillStyle = "#4676a8";
  for (let k = 0; k < n; k++) {
    const frac = Math.max(0, Math.min(1, histogram[k] ?? 0));
    const barH = frac * usable;
    if (barH > 0) ctx.fillRect(k * slot + 1, baseline - barH, barW, barH);
  }

  ctx.strokeStyle = "#555";
  ctx.lineWidth = 1;
  ctx.beginPath();
  ctx.moveTo(0, baseline);
  ctx.lineTo(width, baseline);
  ctx.stroke();
  ctx.restore();
}
