/**
 * The four figure kinds, each a pure function from the engine's CSV/JSON
 * files to an SVG string plus machine-readable metadata.
 *
 * regret_scaling   sweep.csv          per-policy median max(regret, 1) vs T,
 *                                     log-log, annotated with the fitted slope
 * queue_trajectory trace.csv          protected-arm queue lengths plus a
 *                                     c * t^(3/4) reference curve
 * rate_convergence trace.csv + config running served averages vs target lines
 * policy_compare   2x trace.csv       protected-arm running rates overlaid
 */

import { readFileSync, writeFileSync } from "node:fs";
import { basename } from "node:path";

import {
  armColumnNames,
  column,
  EmptyInputError,
  MissingColumnError,
  parseNumericCsv,
  parseSweepCsv,
  type Table,
} from "./csv.js";
import { logLogFit, medianSeries, sweepPolicies } from "./fit.js";
import { PALETTE, renderChart, type Annotation, type HLine, type Series } from "./svg.js";

type HLineList = HLine[];

export const FIGURE_KINDS = [
  "regret_scaling",
  "queue_trajectory",
  "rate_convergence",
  "policy_compare",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureSpec {
  kind: FigureKind;
  inputs: string[];
  output: string;
  /** run config JSON; required for rate_convergence, optional elsewhere */
  configPath?: string;
  title?: string;
}

export interface RenderResult {
  svg: string;
  meta: Record<string, unknown>;
}

interface RunConfig {
  protected: number[];
  targetRates: Map<number, number>;
}

function readConfig(path: string): RunConfig {
  const obj = JSON.parse(readFileSync(path, "utf-8")) as {
    protected?: number[];
    target_rates?: Record<string, number>;
  };
  const rates = new Map<number, number>();
  for (const [arm, rate] of Object.entries(obj.target_rates ?? {})) {
    rates.set(Number(arm), rate);
  }
  return { protected: obj.protected ?? [], targetRates: rates };
}

function readTrace(path: string): Table {
  const table = parseNumericCsv(readFileSync(path, "utf-8"), path);
  for (const name of ["t", "potential"]) {
    if (!table.columns.includes(name)) {
      throw new MissingColumnError(`${path} has no column '${name}'`);
    }
  }
  return table;
}

function protectedArms(config: RunConfig | undefined, table: Table, path: string): number[] {
  if (config) {
    return [...config.protected].sort((a, b) => a - b);
  }
  // fall back to arms whose queue column ever leaves zero
  const arms: number[] = [];
  armColumnNames(table, "q").forEach((name, i) => {
    if (column(table, name, path).some((v) => v > 0)) {
      arms.push(i);
    }
  });
  return arms;
}

function runningAverages(table: Table, arm: number, path: string): Array<[number, number]> {
  const served = column(table, `served_${arm + 1}`, path);
  const out: Array<[number, number]> = [];
  let acc = 0;
  for (let t = 0; t < served.length; t++) {
    acc += served[t]!;
    out.push([t + 1, acc / (t + 1)]);
  }
  return out;
}

function renderRegretScaling(spec: FigureSpec): RenderResult {
  const path = spec.inputs[0]!;
  const rows = parseSweepCsv(readFileSync(path, "utf-8"), path);
  const policies = sweepPolicies(rows);
  const series: Series[] = [];
  const annotations: Annotation[] = [];
  const exponents: Record<string, number> = {};
  policies.forEach((policy, i) => {
    const pts = medianSeries(rows, policy, "regret");
    series.push({
      label: policy,
      points: pts,
      color: PALETTE[i % PALETTE.length]!,
      markers: true,
    });
    const fit = logLogFit(pts);
    exponents[policy] = fit.exponent;
    annotations.push({
      text: `${policy}: slope ${fit.exponent.toFixed(3)} (r2 ${fit.r2.toFixed(3)})`,
      attrs: { "data-policy": policy, "data-exponent": String(fit.exponent) },
    });
  });
  const svg = renderChart({
    title: spec.title ?? "Regret scaling",
    xLabel: "horizon T (log)",
    yLabel: "median max(regret, 1) (log)",
    xLog: true,
    yLog: true,
    series,
    annotations,
  });
  return { svg, meta: { exponents } };
}

function renderQueueTrajectory(spec: FigureSpec): RenderResult {
  const path = spec.inputs[0]!;
  const table = readTrace(path);
  const config = spec.configPath ? readConfig(spec.configPath) : undefined;
  const arms = protectedArms(config, table, path);
  if (arms.length === 0) {
    throw new MissingColumnError(`${path}: no protected arms carry a queue to plot`);
  }
  const ts = column(table, "t", path);
  const series: Series[] = arms.map((arm, i) => ({
    label: `queue, arm ${arm + 1}`,
    points: column(table, `q_${arm + 1}`, path).map((q, j) => [ts[j]!, q] as [number, number]),
    color: PALETTE[i % PALETTE.length]!,
  }));
  const peak = Math.max(...series.flatMap((s) => s.points.map(([, q]) => q)));
  const horizon = ts[ts.length - 1]!;
  if (peak > 0) {
    const c = peak / horizon ** 0.75;
    series.push({
      label: `${c.toFixed(3)} t^0.75 reference`,
      points: ts.map((t) => [t, c * t ** 0.75] as [number, number]),
      color: "#888888",
      dash: "5,4",
    });
  }
  const svg = renderChart({
    title: spec.title ?? "Deficit queue trajectories",
    xLabel: "round t",
    yLabel: "queue length",
    series,
  });
  return { svg, meta: { arms, peak } };
}

function renderRateConvergence(spec: FigureSpec): RenderResult {
  const path = spec.inputs[0]!;
  if (!spec.configPath) {
    throw new MissingColumnError("rate_convergence needs --config for the target rates");
  }
  const table = readTrace(path);
  const config = readConfig(spec.configPath);
  if (config.protected.length === 0) {
    throw new MissingColumnError(
      `${spec.configPath}: no protected arms, nothing to plot against targets`,
    );
  }
  const series: Series[] = [];
  const hLines: HLineList = [];
  let i = 0;
  for (const arm of [...config.protected].sort((a, b) => a - b)) {
    const color = PALETTE[i % PALETTE.length]!;
    series.push({ label: `running rate, arm ${arm + 1}`, points: runningAverages(table, arm, path), color });
    const target = config.targetRates.get(arm);
    if (target !== undefined) {
      hLines.push({ y: target, label: `target ${target}, arm ${arm + 1}`, color });
    }
    i += 1;
  }
  const svg = renderChart({
    title: spec.title ?? "Per-arm rate convergence",
    xLabel: "round t",
    yLabel: "running average reward rate",
    series,
    hLines,
  });
  return { svg, meta: { arms: config.protected } };
}

function renderPolicyCompare(spec: FigureSpec): RenderResult {
  if (spec.inputs.length < 2) {
    throw new EmptyInputError("policy_compare needs two trace files (--in twice)");
  }
  const config = spec.configPath ? readConfig(spec.configPath) : undefined;
  const series: Series[] = [];
  const hLines: HLineList = [];
  spec.inputs.forEach((path, i) => {
    const table = readTrace(path);
    const arms = protectedArms(config, table, path);
    if (arms.length === 0) {
      throw new MissingColumnError(`${path}: no protected arms to compare`);
    }
    for (const arm of arms) {
      series.push({
        label: `${basename(path).replace(/\.csv$/, "")}, arm ${arm + 1}`,
        points: runningAverages(table, arm, path),
        color: PALETTE[(i * 2 + (arm % 2)) % PALETTE.length]!,
        dash: i === 1 ? "5,4" : undefined,
      });
    }
  });
  if (config) {
    for (const [arm, target] of [...config.targetRates.entries()].sort((a, b) => a[0] - b[0])) {
      hLines.push({ y: target, label: `target ${target}, arm ${arm + 1}`, color: "#444444" });
    }
  }
  const svg = renderChart({
    title: spec.title ?? "Achieved protected-arm rates by policy",
    xLabel: "round t",
    yLabel: "running average reward rate",
    series,
    hLines,
  });
  return { svg, meta: { inputs: spec.inputs } };
}

export function renderFigure(spec: FigureSpec): RenderResult {
  if (spec.inputs.length === 0) {
    throw new EmptyInputError("no --in input given");
  }
  switch (spec.kind) {
    case "regret_scaling":
      return renderRegretScaling(spec);
    case "queue_trajectory":
      return renderQueueTrajectory(spec);
    case "rate_convergence":
      return renderRateConvergence(spec);
    case "policy_compare":
      return renderPolicyCompare(spec);
    default:
      throw new EmptyInputError(`unknown figure kind '${String(spec.kind)}'`);
  }
}

export function writeFigure(spec: FigureSpec): RenderResult {
  const result = renderFigure(spec);
  writeFileSync(spec.output, result.svg);
  return result;
}
