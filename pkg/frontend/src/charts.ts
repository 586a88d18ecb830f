import type { Series } from "./types.js";

/** A rendered chart plus the label text of its dominant extremum.  Every
 * number in here is passed through from the service response; the only
 * arithmetic below is pixel mapping. */
export interface ChartModel {
  kind: Series["kind"];
  unit: string;
  svg: string;
  peakLabel: string | null;
  peakX: number | null;
}

const WIDTH = 760;
const HEIGHT = 300;
const PAD = { left: 64, right: 16, top: 30, bottom: 28 };

const STROKE: Record<Series["kind"], string> = {
  shear: "#3182bd",
  moment: "#31a354",
  deflection: "#e6550d",
};
const FILL: Record<Series["kind"], string> = {
  shear: "#9ecae1",
  moment: "#a1d99b",
  deflection: "#fdae6b",
};

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;")
    .replace(/>/g, "&gt;").replace(/"/g, "&quot;");
}

/** The extremum the operator cares about: the larger-magnitude of max/min. */
export function dominantExtremum(series: Series): { x: number; value: number } | null {
  const extrema = series.critical.filter((c) => c.tag === "max" || c.tag === "min");
  if (extrema.length === 0) return null;
  let best = extrema[0]!;
  for (const c of extrema) {
    if (Math.abs(c.value) > Math.abs(best.value)) best = c;
  }
  return { x: best.x, value: best.value };
}

export function buildChart(series: Series, flipY = false): ChartModel {
  const sign = flipY ? -1 : 1;
  const xs = series.points.map((p) => p[0]);
  const vs = series.points.map((p) => sign * p[1]);
  const x0 = Math.min(...xs);
  const x1 = Math.max(...xs);
  let lo = Math.min(0, ...vs);
  let hi = Math.max(0, ...vs);
  if (lo === hi) { lo = -1; hi = 1; }
  const padV = 0.05 * (hi - lo);
  lo -= padV;
  hi += padV;

  const plotW = WIDTH - PAD.left - PAD.right;
  const plotH = HEIGHT - PAD.top - PAD.bottom;
  const px = (x: number) => PAD.left + ((x - x0) / (x1 - x0 || 1)) * plotW;
  const py = (v: number) => PAD.top + ((hi - v) / (hi - lo)) * plotH;

  const line = series.points
    .map((p) => `${px(p[0]).toFixed(2)},${py(sign * p[1]).toFixed(2)}`)
    .join(" ");
  const zeroY = py(0).toFixed(2);
  const polygon = `${px(x0).toFixed(2)},${zeroY} ${line} ${px(x1).toFixed(2)},${zeroY}`;

  const parts = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`,
    `<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`,
    `<text x="${WIDTH / 2}" y="18" text-anchor="middle" font-size="14" font-family="sans-serif">${esc(series.kind)} [${esc(series.unit)}]</text>`,
    `<polygon points="${polygon}" fill="${FILL[series.kind]}" fill-opacity="0.55"/>`,
    `<polyline points="${line}" fill="none" stroke="${STROKE[series.kind]}" stroke-width="1.5"/>`,
    `<line x1="${PAD.left}" y1="${zeroY}" x2="${WIDTH - PAD.right}" y2="${zeroY}" stroke="#222" stroke-width="1.5"/>`,
  ];

  const peak = dominantExtremum(series);
  let peakLabel: string | null = null;
  if (peak) {
    peakLabel = String(peak.value);
    const cx = px(peak.x);
    const cy = py(sign * peak.value);
    const labelY = sign * peak.value >= 0 ? cy - 7 : cy + 15;
    parts.push(`<circle cx="${cx.toFixed(2)}" cy="${cy.toFixed(2)}" r="3.5" fill="${STROKE[series.kind]}"/>`);
    parts.push(`<text x="${cx.toFixed(2)}" y="${labelY.toFixed(2)}" text-anchor="middle" font-size="12" font-family="sans-serif" data-role="peak-label">${esc(peakLabel)}</text>`);
  }
  for (const tick of [lo + padV, hi - padV]) {
    parts.push(`<text x="${PAD.left - 6}" y="${py(tick).toFixed(2)}" text-anchor="end" font-size="11" font-family="sans-serif">${sign * tick}</text>`);
  }
  parts.push("</svg>");
  return { kind: series.kind, unit: series.unit, svg: parts.join("\n"), peakLabel,
           peakX: peak ? peak.x : null };
}
