import type { Detection } from "./types.js";

/** CSS-percentage rectangle for one detection box over the source image. */
export interface OverlayBox {
  index: number;
  klass: string;
  leftPct: number;
  topPct: number;
  widthPct: number;
  heightPct: number;
  needsReview: boolean;
  label: string;
}

export function overlayBoxes(detections: Detection[], review: Set<number>): OverlayBox[] {
  return detections.map((d, index) => {
    const [cx, cy, w, h] = d.bbox;
    return {
      index,
      klass: d.class,
      leftPct: (cx - w / 2) * 100,
      topPct: (cy - h / 2) * 100,
      widthPct: w * 100,
      heightPct: h * 100,
      needsReview: review.has(index),
      label: `${d.class} ${(d.confidence * 100).toFixed(0)}%`,
    };
  });
}
