import { ApiClient } from "./api.js";
import { ViewerController } from "./controller.js";
import { renderHistogram } from "./histogram.js";
import { renderScene } from "./render.js";
import type { PlacementsDoc } from "./types.js";
import { initialView } from "./viewport.js";
import { randomPointsXml } from "./xml.js";

const HIST_HEIGHT = 90;
const LABEL_DIMS = { width: 110, height: 16 };

class ViewerApp {
  private canvas: HTMLCanvasElement;
  private histCanvas: HTMLCanvasElement;
  private banner: HTMLDivElement;
  private status: HTMLSpanElement;
  private gridToggle: HTMLInputElement;
  private frameToggle: HTMLInputElement;
  private controller: ViewerController | null = null;
  private lastDoc: PlacementsDoc | null = null;
  private dragging = false;
  private pMouseX = 0;
  private pMouseY = 0;

  constructor(private root: HTMLElement) {
    const bar = el("div", "toolbar");
    const urlInput = el("input") as HTMLInputElement;
    urlInput.value = `${location.protocol}//${location.hostname}:8123`;
    urlInput.size = 28;
    const countSelect = el("select") as HTMLSelectElement;
    for (const n of [500, 1500, 4000, 11000]) {
      const opt = document.createElement("option");
      opt.value = String(n);
      opt.textContent = `${n} points`;
      countSelect.append(opt);
    }
    countSelect.value = "1500";
    const loadBtn = el("button") as HTMLButtonElement;
    loadBtn.textContent = "load demo data";
    this.frameToggle = checkbox(bar, "per-frame requests");
    this.gridToggle = checkbox(bar, "show grid");
    this.status = el("span", "status") as HTMLSpanElement;
    bar.prepend(labeled("service", urlInput), countSelect, loadBtn);
    bar.append(this.status);

    this.banner = el("div", "banner") as HTMLDivElement;
    this.banner.hidden = true;

    this.canvas = document.createElement("canvas");
    this.canvas.className = "map";
    this.histCanvas = document.createElement("canvas");
    this.histCanvas.className = "hist";
    this.histCanvas.height = HIST_HEIGHT;

    root.append(bar, this.banner, this.canvas, this.histCanvas);

    loadBtn.onclick = () => {
      void this.loadDataset(urlInput.value.replace(/\/$/, ""), Number(countSelect.value));
    };
    this.frameToggle.onchange = () => {
      this.controller?.setMode(this.frameToggle.checked ? "frame" : "debounce");
    };
    this.gridToggle.onchange = () => this.redraw();

    this.canvas.onmousedown = (ev) => {
      this.dragging = true;
      this.pMouseX = ev.offsetX;
      this.pMouseY = ev.offsetY;
    };
    window.addEventListener("mouseup", () => {
      this.dragging = false;
    });
    this.canvas.onmousemove = (ev) => {
      if (!this.dragging || !this.controller) return;
      this.controller.pan(ev.offsetX - this.pMouseX, ev.offsetY - this.pMouseY);
      this.pMouseX = ev.offsetX;
      this.pMouseY = ev.offsetY;
    };
    this.canvas.onwheel = (ev) => {
      ev.preventDefault();
      this.controller?.zoom(ev.deltaY < 0 ? 1.25 : 0.8, ev.offsetX, ev.offsetY);
    };
    new ResizeObserver(() => this.fitCanvas()).observe(root);
    this.fitCanvas();
  }

  private fitCanvas(): void {
    const w = Math.max(300, this.root.clientWidth - 4);
    const h = Math.max(200, window.innerHeight - HIST_HEIGHT - 90);
    if (this.canvas.width === w && this.canvas.height === h) return;
    this.canvas.width = w;
    this.canvas.height = h;
    this.histCanvas.width = w;
    this.controller?.setSize(w, h);
    this.redraw();
  }

  private async loadDataset(baseUrl: string, n: number): Promise<void> {
    this.controller?.dispose();
    this.controller = null;
    this.status.textContent = "uploading…";
    try {
      const api = new ApiClient(baseUrl);
      const up = await api.uploadDataset(randomPointsXml(n, 12345));
      this.controller = new ViewerController(
        api,
        up.dataset_id,
        initialView(this.canvas.width, this.canvas.height),
        { labelDims: LABEL_DIMS },
        {
          onFrame: (doc) => this.showFrame(doc),
          onError: (err) => this.showError(err),
        },
      );
      this.controller.setMode(this.frameToggle.checked ? "frame" : "debounce");
      this.controller.refresh();
    } catch (err) {
      this.showError(err instanceof Error ? err : new Error(String(err)));
    }
  }

  private showFrame(doc: PlacementsDoc): void {
    this.lastDoc = doc;
    this.banner.hidden = true;
    this.redraw();
    const m = doc.metrics;
    this.status.textContent =
      `${m.labels_placed}/${m.n_visible} labeled in ${m.elapsed_ms.toFixed(1)} ms` +
      (m.anomaly_count ? `, ${m.anomaly_count} anomalies` : "");
  }

  private showError(err: Error): void {
    // Keep the previous frame on the canvas; just surface the failure.
    this.banner.textContent = `request failed: ${err.message}`;
    this.banner.hidden = false;
  }

  private redraw(): void {
    if (!this.lastDoc) return;
    const ctx = this.canvas.getContext("2d");
    const hctx = this.histCanvas.getContext("2d");
    if (!ctx || !hctx) return;
    renderScene(ctx, this.lastDoc, { showGrid: this.gridToggle.checked });
    renderHistogram(hctx, this.lastDoc.metrics.histogram, this.histCanvas.width, HIST_HEIGHT);
  }
}

function el(tag: string, cls?: string): HTMLElement {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  return node;
}

function labeled(text: string, input: HTMLElement): HTMLLabelElement {
  const lab = document.createElement("label");
  lab.append(`${text} `, input);
  return lab;
}

function checkbox(parent: HTMLElement, text: string): HTMLInputElement {
  const input = document.createElement("input");
  input.type = "checkbox";
  const lab = document.createElement("label");
  lab.append(input, ` ${text}`);
  parent.append(lab);
  return input;
}

window.addEventListener("DOMContentLoaded", () => {
  const root = document.getElementById("app");
  if (root) new ViewerApp(root);
});
