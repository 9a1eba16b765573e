/**
 * plots CLI.
 *
 *   plots aggregate <results.csv...> --out table.csv
 *   plots render <table.csv> --kind perf|tail|timing --out fig.svg [--deterministic]
 *
 * Figures are vector SVG files.  Exit codes: 0 success, 1 usage or empty
 * selection, 2 runtime error.
 */

import { readFileSync, writeFileSync } from "fs";
import { aggregate, tableFromCsv, tableToCsv } from "./aggregate.js";
import { EmptySelectionError, FIGURE_KINDS, FigureKind, renderPerf, renderTail, renderTiming } from "./render.js";

interface ParsedArgs {
  positional: string[];
  options: Map<string, string | true>;
}

function parseArgs(argv: string[]): ParsedArgs {
  const positional: string[] = [];
  const options = new Map<string, string | true>();
  for (let i = 0; i < argv.length; i++) {
    const token = argv[i];
    if (token.startsWith("--")) {
      const name = token.slice(2);
      const next = argv[i + 1];
      if (name === "deterministic") {
        options.set(name, true);
      } else if (next !== undefined && !next.startsWith("--")) {
        options.set(name, next);
        i++;
      } else {
        options.set(name, true);
      }
    } else {
      positional.push(token);
    }
  }
  return { positional, options };
}

function requireOut(options: Map<string, string | true>): string {
  const out = options.get("out");
  if (typeof out !== "string") {
    throw new UsageError("--out PATH is required");
  }
  return out;
}

class UsageError extends Error {}

function runAggregate(args: ParsedArgs): void {
  if (args.positional.length === 0) {
    throw new UsageError("aggregate needs at least one results CSV");
  }
  const outPath = requireOut(args.options);
  const inputs = args.positional.map((path) => ({ text: readFileSync(path, "utf8"), name: path }));
  const table = aggregate(inputs);
  writeFileSync(outPath, tableToCsv(table));
  console.log(`wrote ${table.length} aggregate rows to ${outPath}`);
}

function runRender(args: ParsedArgs): void {
  if (args.positional.length !== 1) {
    throw new UsageError("render needs exactly one input table");
  }
  const kind = args.options.get("kind");
  if (typeof kind !== "string" || !FIGURE_KINDS.includes(kind as FigureKind)) {
    throw new UsageError(`--kind must be one of ${FIGURE_KINDS.join("|")}`);
  }
  const outPath = requireOut(args.options);
  const deterministic = args.options.get("deterministic") === true;
  const text = readFileSync(args.positional[0], "utf8");
  let svg: string;
  if (kind === "tail") {
    svg = renderTail(text, deterministic);
  } else {
    const table = tableFromCsv(text, args.positional[0]);
    svg = kind === "perf" ? renderPerf(table, deterministic) : renderTiming(table, deterministic);
  }
  writeFileSync(outPath, svg);
  console.log(`wrote ${kind} figure to ${outPath}`);
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    if (command === "aggregate") {
      runAggregate(parseArgs(rest));
    } else if (command === "render") {
      runRender(parseArgs(rest));
    } else {
      throw new UsageError("usage: plots aggregate|render ...");
    }
    return 0;
  } catch (error) {
    if (error instanceof UsageError || error instanceof EmptySelectionError) {
      console.error(`error: ${(error as Error).message}`);
      return 1;
    }
    console.error(`runtime error: ${(error as Error).message}`);
    return 2;
  }
}

const entryUrl = process.argv[1] ? new URL(`file://${process.argv[1]}`).href : "";
if (import.meta.url === entryUrl) {
  process.exit(main(process.argv.slice(2)));
}
