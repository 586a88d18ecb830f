import { HttpApiClient } from "./api.js";
import { buildChart } from "./charts.js";
import { overlayBoxes } from "./overlay.js";
import { Session } from "./session.js";
import type { DetectionClass, Series } from "./types.js";

const CLASSES: DetectionClass[] = ["pload", "dload", "fixed", "roller", "simple", "moment"];

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

const session = new Session(new HttpApiClient(), render);

const imageInput = byId<HTMLInputElement>("image-file");
const detectionsInput = byId<HTMLInputElement>("detections-file");
const stage = byId<HTMLDivElement>("stage");
const editor = byId<HTMLDivElement>("editor");
const statusBar = byId<HTMLDivElement>("status");
const chartsHost = byId<HTMLDivElement>("charts");
const reinferButton = byId<HTMLButtonElement>("reinfer");
const solveButton = byId<HTMLButtonElement>("solve");
const exportButton = byId<HTMLButtonElement>("export-series");

let imageUrl: string | null = null;
let pendingDetections: string | null = null;

function maybeLoad(): void {
  if (pendingDetections !== null) {
    session.loadSession(imageUrl, pendingDetections);
  }
}

imageInput.addEventListener("change", () => {
  const file = imageInput.files?.[0];
  if (!file) return;
  if (imageUrl) URL.revokeObjectURL(imageUrl);
  imageUrl = URL.createObjectURL(file);
  maybeLoad();
});

detectionsInput.addEventListener("change", async () => {
  const file = detectionsInput.files?.[0];
  if (!file) return;
  pendingDetections = await file.text();
  maybeLoad();
});

reinferButton.addEventListener("click", () => void session.reinfer());
solveButton.addEventListener("click", () => void session.solve());

exportButton.addEventListener("click", () => {
  const view = session.view();
  if (!view.rawSolve) return;
  // export exactly the bytes the service sent
  const blob = new Blob([view.rawSolve], { type: "application/json" });
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = "solution.json";
  link.click();
  URL.revokeObjectURL(link.href);
});

function render(): void {
  const view = session.view();

  statusBar.textContent = view.error ?? (view.busy ? "working..." :
    view.dirty ? "edited: run inference" : "");
  statusBar.className = view.error ? "status error" : "status";

  reinferButton.disabled = !view.loaded || view.busy;
  solveButton.disabled = !view.loaded || view.dirty || view.busy || !view.report;
  exportButton.disabled = !view.chartsVisible;

  // image + overlays
  stage.innerHTML = "";
  if (view.imageUrl) {
    const img = document.createElement("img");
    img.src = view.imageUrl;
    stage.appendChild(img);
  }
  for (const box of overlayBoxes(view.detections, view.reviewIndices)) {
    const el = document.createElement("div");
    el.className = box.needsReview ? "overlay review" : "overlay";
    el.style.left = `${box.leftPct}%`;
    el.style.top = `${box.topPct}%`;
    el.style.width = `${box.widthPct}%`;
    el.style.height = `${box.heightPct}%`;
    el.title = box.label;
    el.dataset.klass = box.klass;
    stage.appendChild(el);
  }

  renderEditor();
  renderCharts();
}

function renderEditor(): void {
  const view = session.view();
  editor.innerHTML = "";
  view.detections.forEach((d, index) => {
    const row = document.createElement("div");
    row.className = view.reviewIndices.has(index) ? "det-row review" : "det-row";

    const classSelect = document.createElement("select");
    for (const klass of CLASSES) {
      const option = document.createElement("option");
      option.value = klass;
      option.textContent = klass;
      option.selected = klass === d.class;
      classSelect.appendChild(option);
    }
    classSelect.addEventListener("change", () => {
      if (!session.editDetection(index, { class: classSelect.value as DetectionClass })) {
        classSelect.value = d.class; // rejected edit: restore
      }
    });
    row.appendChild(classSelect);

    const position = document.createElement("input");
    position.type = "number";
    position.step = "0.01";
    position.min = "0";
    position.max = "1";
    position.value = String(d.bbox[0]);
    position.title = "normalized center x";
    position.addEventListener("change", () => {
      if (!session.editDetection(index, { cx: Number(position.value) })) {
        position.value = String(d.bbox[0]);
      }
    });
    row.appendChild(position);

    const magnitude = document.createElement("input");
    magnitude.type = "number";
    magnitude.placeholder = "magnitude";
    magnitude.addEventListener("change", () => {
      session.setLoadMagnitude(index, Number(magnitude.value));
    });
    if (d.class === "pload" || d.class === "dload" || d.class === "moment") {
      row.appendChild(magnitude);
    }
    editor.appendChild(row);
  });

  view.annotations.forEach((a, index) => {
    const row = document.createElement("div");
    row.className = "ann-row";
    const text = document.createElement("input");
    text.value = a.text;
    text.addEventListener("change", () => session.editAnnotation(index, text.value));
    row.appendChild(text);
    editor.appendChild(row);
  });
}

function renderCharts(): void {
  const view = session.view();
  chartsHost.innerHTML = "";
  if (!view.chartsVisible || !view.solve) return; // stale-data guard
  const kinds: (keyof typeof view.solve.series)[] = ["shear", "moment", "deflection"];
  for (const kind of kinds) {
    const series: Series = view.solve.series[kind];
    const chart = buildChart(series, kind === "deflection");
    const holder = document.createElement("div");
    holder.className = "chart";
    holder.innerHTML = chart.svg;
    chartsHost.appendChild(holder);
  }
}

render();
