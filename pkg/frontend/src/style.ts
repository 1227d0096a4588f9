import { readFileSync } from "fs";

/**
 * Figure styling, loaded from a small JSON file so the rendered set is
 * reproducible. Any field absent from the file keeps its default.
 */

export interface Style {
  width: number;
  height: number;
  margin: { top: number; right: number; bottom: number; left: number };
  fontFamily: string;
  fontSize: number;
  background: string;
  axisColor: string;
  gridColor: string;
  lineColor: string;
  lineWidth: number;
  overlayColor: string;
  bandColor: string;
  bandOpacity: number;
  barColor: string;
  barOpacity: number;
  markerColor: string;
  markerRadius: number;
  heatmapLow: string;
  heatmapHigh: string;
}

export const DEFAULT_STYLE: Style = {
  width: 640,
  height: 420,
  margin: { top: 36, right: 20, bottom: 44, left: 56 },
  fontFamily: "sans-serif",
  fontSize: 12,
  background: "#ffffff",
  axisColor: "#333333",
  gridColor: "#dddddd",
  lineColor: "#1f77b4",
  lineWidth: 1.6,
  overlayColor: "#d62728",
  bandColor: "#1f77b4",
  bandOpacity: 0.18,
  barColor: "#888888",
  barOpacity: 0.55,
  markerColor: "#2ca02c",
  markerRadius: 3.5,
  heatmapLow: "#f7fbff",
  heatmapHigh: "#08306b",
};

export function loadStyle(path?: string): Style {
  if (!path) {
    return { ...DEFAULT_STYLE, margin: { ...DEFAULT_STYLE.margin } };
  }
  const overrides = JSON.parse(readFileSync(path, "utf8"));
  return {
    ...DEFAULT_STYLE,
    ...overrides,
    margin: { ...DEFAULT_STYLE.margin, ...(overrides.margin ?? {}) },
  };
}
