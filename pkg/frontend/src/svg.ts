/**
 * Dependency-free SVG line charts. Output is a pure function of the chart
 * description: no timestamps, no randomness, fixed-precision coordinates.
 */

export interface Series {
  label: string;
  points: Array<[number, number]>;
  color: string;
  dash?: string;
  markers?: boolean;
}

export interface HLine {
  y: number;
  label: string;
  color: string;
}

export interface Annotation {
  text: string;
  attrs?: Record<string, string>;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  hLines?: HLine[];
  annotations?: Annotation[];
  xLog?: boolean;
  yLog?: boolean;
  width?: number;
  height?: number;
}

const MARGIN = { top: 44, right: 24, bottom: 52, left: 64 };

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(v: number): string {
  return v.toFixed(2);
}

function tickLabel(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a >= 1e5 || a < 1e-3)) {
    return v.toExponential(0).replace("+", "");
  }
  const rounded = Number(v.toPrecision(6));
  return String(rounded);
}

interface Scale {
  (v: number): number;
  ticks: number[];
}

function makeScale(lo: number, hi: number, outLo: number, outHi: number, log: boolean): Scale {
  if (log) {
    const a = Math.log10(lo);
    const b = Math.log10(hi);
    const span = b - a || 1;
    const scale = ((v: number) => outLo + ((Math.log10(v) - a) / span) * (outHi - outLo)) as Scale;
    const ticks: number[] = [];
    for (let e = Math.ceil(a - 1e-9); e <= Math.floor(b + 1e-9); e++) {
      ticks.push(10 ** e);
    }
    scale.ticks = ticks.length >= 2 ? ticks : [lo, hi];
    return scale;
  }
  const span = hi - lo || 1;
  const scale = ((v: number) => outLo + ((v - lo) / span) * (outHi - outLo)) as Scale;
  const step = niceStep(span / 5);
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  scale.ticks = ticks;
  return scale;
}

function niceStep(raw: number): number {
  const mag = 10 ** Math.floor(Math.log10(raw));
  const norm = raw / mag;
  if (norm <= 1) return mag;
  if (norm <= 2) return 2 * mag;
  if (norm <= 5) return 5 * mag;
  return 10 * mag;
}

function extent(values: number[], log: boolean): [number, number] {
  const usable = log ? values.filter((v) => v > 0) : values;
  if (usable.length === 0) {
    return log ? [0.1, 10] : [0, 1];
  }
  let lo = Math.min(...usable);
  let hi = Math.max(...usable);
  if (lo === hi) {
    lo = log ? lo / 2 : lo - 1;
    hi = log ? hi * 2 : hi + 1;
  } else if (!log) {
    const pad = (hi - lo) * 0.05;
    lo = lo >= 0 && lo - pad < 0 ? 0 : lo - pad;
    hi += pad;
  }
  return [lo, hi];
}

export function renderChart(spec: ChartSpec): string {
  const width = spec.width ?? 720;
  const height = spec.height ?? 440;
  const plotW = width - MARGIN.left - MARGIN.right;
  const plotH = height - MARGIN.top - MARGIN.bottom;

  const xs = spec.series.flatMap((s) => s.points.map(([x]) => x));
  const ys = spec.series
    .flatMap((s) => s.points.map(([, y]) => y))
    .concat((spec.hLines ?? []).map((h) => h.y));
  const [x0, x1] = extent(xs, spec.xLog ?? false);
  const [y0, y1] = extent(ys, spec.yLog ?? false);
  const sx = makeScale(x0, x1, MARGIN.left, MARGIN.left + plotW, spec.xLog ?? false);
  const sy = makeScale(y0, y1, MARGIN.top + plotH, MARGIN.top, spec.yLog ?? false);

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(
    `<text x="${fmt(width / 2)}" y="24" text-anchor="middle" font-size="15" ` +
      `font-weight="bold">${esc(spec.title)}</text>`,
  );

  // axes and grid
  for (const t of sx.ticks) {
    if (t < x0 - 1e-12 || t > x1 + 1e-12) continue;
    const px = sx(t);
    parts.push(
      `<line x1="${fmt(px)}" y1="${fmt(MARGIN.top)}" x2="${fmt(px)}" ` +
        `y2="${fmt(MARGIN.top + plotH)}" stroke="#e0e0e0" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(px)}" y="${fmt(MARGIN.top + plotH + 18)}" text-anchor="middle" ` +
        `font-size="11">${esc(tickLabel(t))}</text>`,
    );
  }
  for (const t of sy.ticks) {
    if (t < y0 - 1e-12 || t > y1 + 1e-12) continue;
    const py = sy(t);
    parts.push(
      `<line x1="${fmt(MARGIN.left)}" y1="${fmt(py)}" x2="${fmt(MARGIN.left + plotW)}" ` +
        `y2="${fmt(py)}" stroke="#e0e0e0" stroke-width="1"/>`,
    );
    parts.push(
      `<text x="${fmt(MARGIN.left - 8)}" y="${fmt(py + 4)}" text-anchor="end" ` +
        `font-size="11">${esc(tickLabel(t))}</text>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" ` +
      `fill="none" stroke="#444" stroke-width="1"/>`,
  );
  parts.push(
    `<text x="${fmt(MARGIN.left + plotW / 2)}" y="${fmt(height - 14)}" text-anchor="middle" ` +
      `font-size="12">${esc(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text x="18" y="${fmt(MARGIN.top + plotH / 2)}" text-anchor="middle" font-size="12" ` +
      `transform="rotate(-90 18 ${fmt(MARGIN.top + plotH / 2)})">${esc(spec.yLabel)}</text>`,
  );

  for (const h of spec.hLines ?? []) {
    const py = sy(h.y);
    parts.push(
      `<line x1="${fmt(MARGIN.left)}" y1="${fmt(py)}" x2="${fmt(MARGIN.left + plotW)}" ` +
        `y2="${fmt(py)}" stroke="${h.color}" stroke-width="1.2" stroke-dasharray="6,4"/>`,
    );
    parts.push(
      `<text x="${fmt(MARGIN.left + plotW - 4)}" y="${fmt(py - 5)}" text-anchor="end" ` +
        `font-size="11" fill="${h.color}">${esc(h.label)}</text>`,
    );
  }

  for (const s of spec.series) {
    const pts = s.points.filter(([x, y]) =>
      (!(spec.xLog ?? false) || x > 0) && (!(spec.yLog ?? false) || y > 0),
    );
    if (pts.length === 0) continue;
    const path = pts.map(([x, y]) => `${fmt(sx(x))},${fmt(sy(y))}`).join(" ");
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<polyline fill="none" stroke="${s.color}" stroke-width="1.6"${dash} points="${path}"/>`,
    );
    if (s.markers) {
      for (const [x, y] of pts) {
        parts.push(`<circle cx="${fmt(sx(x))}" cy="${fmt(sy(y))}" r="3" fill="${s.color}"/>`);
      }
    }
  }

  // legend, top-left inside the plot
  let ly = MARGIN.top + 14;
  for (const s of spec.series) {
    const lx = MARGIN.left + 10;
    const dash = s.dash ? ` stroke-dasharray="${s.dash}"` : "";
    parts.push(
      `<line x1="${lx}" y1="${fmt(ly - 4)}" x2="${lx + 22}" y2="${fmt(ly - 4)}" ` +
        `stroke="${s.color}" stroke-width="2"${dash}/>`,
    );
    parts.push(`<text x="${lx + 28}" y="${fmt(ly)}" font-size="11">${esc(s.label)}</text>`);
    ly += 16;
  }

  let ay = MARGIN.top + 14;
  for (const a of spec.annotations ?? []) {
    const attrs = Object.entries(a.attrs ?? {})
      .map(([k, v]) => ` ${k}="${esc(v)}"`)
      .join("");
    parts.push(
      `<text x="${fmt(MARGIN.left + plotW - 8)}" y="${fmt(ay)}" text-anchor="end" ` +
        `font-size="11" fill="#333"${attrs}>${esc(a.text)}</text>`,
    );
    ay += 16;
  }

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

export const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
