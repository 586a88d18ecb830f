import { describe, expect, it } from "vitest";

import { buildChart, dominantExtremum } from "../src/charts.js";
import type { Series } from "../src/types.js";

function momentSeries(): Series {
  return {
    kind: "moment",
    unit: "kg·cm",
    points: [[0, 0], [2.5, 125], [5, 250], [7.5, 125], [10, 0]],
    critical: [
      { x: 5, value: 250, tag: "max" },
      { x: 0, value: 0, tag: "min" },
    ],
  };
}

describe("charts", () => {
  it("peak label is the served extremum, verbatim", () => {
    const chart = buildChart(momentSeries());
    expect(chart.peakLabel).toBe("250");
    expect(chart.peakX).toBe(5);
    expect(chart.svg).toContain('data-role="peak-label">250</text>');
  });

  it("dominant extremum is the larger magnitude of max/min", () => {
    const series = momentSeries();
    series.critical = [
      { x: 1, value: 30, tag: "max" },
      { x: 6, value: -45, tag: "min" },
    ];
    expect(dominantExtremum(series)).toEqual({ x: 6, value: -45 });
  });

  it("unit label appears verbatim in the chart title", () => {
    expect(buildChart(momentSeries()).svg).toContain("moment [kg·cm]");
  });

  it("rendering is deterministic", () => {
    expect(buildChart(momentSeries()).svg).toBe(buildChart(momentSeries()).svg);
  });

  it("flipping the axis changes pixels, never the label", () => {
    const up = buildChart(momentSeries(), false);
    const down = buildChart(momentSeries(), true);
    expect(down.peakLabel).toBe(up.peakLabel);
    expect(down.svg).not.toBe(up.svg);
  });

  it("series without extrema get no label", () => {
    const series = momentSeries();
    series.critical = [];
    expect(buildChart(series).peakLabel).toBeNull();
  });
});
