// Figure model: named series extracted from traces plus axis metadata.
// rel_err curves are drawn on a log scale with raw values clamped to a
// 1e-16 floor (converged traces can hit exact zero).

import { Trace, TraceRow } from "./trace.js";

export type XAxis = "epochs" | "wall_seconds";
export type YAxis = "rel_err" | "test_acc";

export const REL_ERR_FLOOR = 1e-16;

export interface FigureSpec {
  xAxis: XAxis;
  yAxis: YAxis;
  labels?: string[];
  title?: string;
}

export interface Series {
  label: string;
  x: number[];
  y: number[];
}

export interface Figure {
  series: Series[];
  xLabel: string;
  yLabel: string;
  logY: boolean;
  xRange: [number, number];
  yRange: [number, number];
  title: string;
}

function pick(row: TraceRow, axis: XAxis | YAxis): number {
  switch (axis) {
    case "epochs":
      return row.epoch;
    case "wall_seconds":
      return row.wall_seconds;
    case "rel_err":
      return row.rel_err;
    case "test_acc":
      return row.test_acc;
  }
}

export function buildFigure(traces: Trace[], spec: FigureSpec): Figure {
  if (traces.length === 0) throw new Error("no traces given");
  const prints = traces
    .map((t) => t.manifest?.dataset)
    .filter((d): d is string => typeof d === "string");
  if (new Set(prints).size > 1) {
    throw new Error("traces come from different datasets (fingerprint mismatch)");
  }
  const logY = spec.yAxis === "rel_err";
  const series: Series[] = traces.map((trace, i) => {
    const label =
      spec.labels?.[i] ??
      (trace.manifest?.config?.["method"] as string | undefined) ??
      `trace ${i + 1}`;
    const x: number[] = [];
    const y: number[] = [];
    for (const row of trace.rows) {
      const xv = pick(row, spec.xAxis);
      let yv = pick(row, spec.yAxis);
      if (Number.isNaN(xv) || Number.isNaN(yv)) continue;
      if (logY) yv = Math.max(yv, REL_ERR_FLOOR);
      x.push(xv);
      y.push(yv);
    }
    if (x.length === 0) throw new Error(`series ${label}: no plottable points`);
    return { label, x, y };
  });

  const xs = series.flatMap((s) => s.x);
  const ys = series.flatMap((s) => s.y);
  return {
    series,
    xLabel: spec.xAxis === "epochs" ? "epochs" : "wall time (s)",
    yLabel: spec.yAxis === "rel_err" ? "relative error" : "test accuracy",
    logY,
    xRange: [Math.min(...xs), Math.max(...xs)],
    yRange: [Math.min(...ys), Math.max(...ys)],
    title: spec.title ?? "",
  };
}
