/**
 * Minimal CSV reader for the engine's output schemas (trace.csv, sweep.csv).
 * All columns after the header are numeric; values are written by the engine
 * in shortest round-trip form, so Number() recovers them bit-exactly.
 */

export class MissingColumnError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "MissingColumnError";
  }
}

export class EmptyInputError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "EmptyInputError";
  }
}

export interface Table {
  columns: string[];
  rows: number[][];
}

export function parseNumericCsv(text: string, path = "<input>"): Table {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new EmptyInputError(`${path} is empty`);
  }
  const columns = lines[0]!.split(",").map((c) => c.trim());
  if (lines.length === 1) {
    throw new EmptyInputError(`${path} has a header but no data rows`);
  }
  const rows: number[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i]!.split(",");
    if (cells.length !== columns.length) {
      throw new EmptyInputError(
        `${path}:${i + 1} has ${cells.length} cells, expected ${columns.length}`,
      );
    }
    rows.push(cells.map(Number));
  }
  return { columns, rows };
}

export function columnIndex(table: Table, name: string, path = "<input>"): number {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new MissingColumnError(`${path} has no column '${name}'`);
  }
  return idx;
}

export function column(table: Table, name: string, path = "<input>"): number[] {
  const idx = columnIndex(table, name, path);
  return table.rows.map((row) => row[idx]!);
}

/** Arm-indexed columns like q_1..q_N, returned in arm order. */
export function armColumnNames(table: Table, prefix: string): string[] {
  const pattern = new RegExp(`^${prefix}_(\\d+)$`);
  return table.columns
    .map((name) => ({ name, m: pattern.exec(name) }))
    .filter((e): e is { name: string; m: RegExpExecArray } => e.m !== null)
    .sort((a, b) => Number(a.m[1]) - Number(b.m[1]))
    .map((e) => e.name);
}

/** Policy labels are the only non-numeric cells; sweep.csv needs raw text. */
export interface SweepRow {
  policy: string;
  T: number;
  rep: number;
  regret: number;
  maxQueue: number;
}

export function parseSweepCsv(text: string, path = "sweep.csv"): SweepRow[] {
  const lines = text.split(/\r?\n/).filter((line) => line.trim().length > 0);
  if (lines.length === 0) {
    throw new EmptyInputError(`${path} is empty`);
  }
  const columns = lines[0]!.split(",");
  for (const required of ["policy", "T", "rep", "regret", "max_queue"]) {
    if (!columns.includes(required)) {
      throw new MissingColumnError(`${path} has no column '${required}'`);
    }
  }
  if (lines.length === 1) {
    throw new EmptyInputError(`${path} has a header but no data rows`);
  }
  const at = (name: string) => columns.indexOf(name);
  return lines.slice(1).map((line) => {
    const cells = line.split(",");
    return {
      policy: cells[at("policy")]!,
      T: Number(cells[at("T")]),
      rep: Number(cells[at("rep")]),
      regret: Number(cells[at("regret")]),
      maxQueue: Number(cells[at("max_queue")]),
    };
  });
}
