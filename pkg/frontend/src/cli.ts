/**
 * plot --kind KIND --in PATH [--in PATH2] --out PATH [--config CONFIG.json]
 *      [--title TEXT]
 *
 * Consumes the engine's documented CSV/JSON schemas and writes an SVG.
 */

import { EmptyInputError, MissingColumnError } from "./csv.js";
import { FIGURE_KINDS, writeFigure, type FigureKind, type FigureSpec } from "./figures.js";

export function parseArgs(argv: string[]): FigureSpec {
  let kind: string | undefined;
  let output: string | undefined;
  let configPath: string | undefined;
  let title: string | undefined;
  const inputs: string[] = [];
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i]!;
    const next = () => {
      i += 1;
      const v = argv[i];
      if (v === undefined) {
        throw new Error(`${arg} needs a value`);
      }
      return v;
    };
    switch (arg) {
      case "--kind":
        kind = next();
        break;
      case "--in":
        inputs.push(next());
        break;
      case "--out":
        output = next();
        break;
      case "--config":
        configPath = next();
        break;
      case "--title":
        title = next();
        break;
      default:
        throw new Error(`unknown flag '${arg}'`);
    }
  }
  if (!kind || !(FIGURE_KINDS as readonly string[]).includes(kind)) {
    throw new Error(`--kind must be one of: ${FIGURE_KINDS.join(", ")}`);
  }
  if (inputs.length === 0 || !output) {
    throw new Error("--in and --out are required");
  }
  return { kind: kind as FigureKind, inputs, output, configPath, title };
}

export function main(argv: string[]): number {
  try {
    const spec = parseArgs(argv);
    const result = writeFigure(spec);
    console.log(`wrote ${spec.output}`);
    if ("exponents" in result.meta) {
      for (const [policy, exp] of Object.entries(result.meta.exponents as Record<string, number>)) {
        console.log(`${policy} exponent ${exp}`);
      }
    }
    return 0;
  } catch (err) {
    if (err instanceof MissingColumnError || err instanceof EmptyInputError) {
      console.error(`error: ${err.message}`);
    } else {
      console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    }
    return 1;
  }
}

if (process.argv[1] && process.argv[1].endsWith("cli.js")) {
  process.exit(main(process.argv.slice(2)));
}
