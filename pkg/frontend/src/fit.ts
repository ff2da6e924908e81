/**
 * Log-log regression matching the engine's fit exactly: same median
 * convention, same guard max(regret, 1), same least-squares formula, so the
 * annotated exponent reproduces exponents.json to floating-point noise.
 */

import type { SweepRow } from "./csv.js";

export function median(values: number[]): number {
  if (values.length === 0) {
    throw new Error("median of empty list");
  }
  const sorted = [...values].sort((a, b) => a - b);
  const mid = Math.floor(sorted.length / 2);
  return sorted.length % 2 === 1 ? sorted[mid]! : (sorted[mid - 1]! + sorted[mid]!) / 2;
}

export interface LogLogFit {
  exponent: number;
  r2: number;
}

export function logLogFit(points: Array<[number, number]>): LogLogFit {
  const distinct = new Set(points.map(([t]) => t));
  if (distinct.size < 3) {
    throw new Error(`need at least 3 distinct horizons, got ${points.length} points`);
  }
  for (const [t, v] of points) {
    if (!(t > 0) || !(v > 0)) {
      throw new Error(`cannot fit log-log through (T=${t}, value=${v})`);
    }
  }
  const xs = points.map(([t]) => Math.log(t));
  const ys = points.map(([, v]) => Math.log(v));
  const xMean = xs.reduce((a, b) => a + b, 0) / xs.length;
  const yMean = ys.reduce((a, b) => a + b, 0) / ys.length;
  let sxy = 0;
  let sxx = 0;
  for (let i = 0; i < xs.length; i++) {
    sxy += (xs[i]! - xMean) * (ys[i]! - yMean);
    sxx += (xs[i]! - xMean) * (xs[i]! - xMean);
  }
  const slope = sxy / sxx;
  let ssRes = 0;
  let ssTot = 0;
  for (let i = 0; i < xs.length; i++) {
    const dy = ys[i]! - yMean;
    const resid = dy - slope * (xs[i]! - xMean);
    ssRes += resid * resid;
    ssTot += dy * dy;
  }
  return { exponent: slope, r2: ssTot <= 0 ? 1.0 : 1.0 - ssRes / ssTot };
}

export function sweepPolicies(rows: SweepRow[]): string[] {
  return [...new Set(rows.map((r) => r.policy))];
}

/** Per-horizon medians of the metric the engine fits. */
export function medianSeries(
  rows: SweepRow[],
  policy: string,
  metric: "regret" | "max_queue",
): Array<[number, number]> {
  const mine = rows.filter((r) => r.policy === policy);
  const horizons = [...new Set(mine.map((r) => r.T))].sort((a, b) => a - b);
  return horizons.map((T) => {
    const vals = mine
      .filter((r) => r.T === T)
      .map((r) => (metric === "regret" ? Math.max(r.regret, 1.0) : r.maxQueue));
    return [T, median(vals)];
  });
}
