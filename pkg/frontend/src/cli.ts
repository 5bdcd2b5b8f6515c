#!/usr/bin/env node
/**
 * report <kind> <input.csv> -o <figure.svg>
 *
 * kind: moments | coupling | bounds
 */

import { CsvError } from "./csv.js";
import { FigureSpec, renderFigure } from "./report.js";

const KINDS = ["moments", "coupling", "bounds"] as const;

function usage(): never {
  process.stderr.write("usage: report <moments|coupling|bounds> <input.csv> -o <figure.svg>\n");
  process.exit(2);
}

export function main(argv: string[]): number {
  const args = argv.slice(2);
  if (args.length !== 4 || args[2] !== "-o") {
    usage();
  }
  const kind = args[0];
  if (!(KINDS as readonly string[]).includes(kind)) {
    process.stderr.write(`unknown figure kind '${kind}'\n`);
    return 2;
  }
  const spec: FigureSpec = {
    kind: kind as FigureSpec["kind"],
    inputCsv: args[1],
    output: args[3],
  };
  try {
    renderFigure(spec);
  } catch (err) {
    if (err instanceof CsvError) {
      process.stderr.write(`error: ${err.message}\n`);
      return 1;
    }
    if (err instanceof Error && "code" in err && err.code === "ENOENT") {
      process.stderr.write(`error: cannot read '${spec.inputCsv}'\n`);
      return 1;
    }
    throw err;
  }
  process.stdout.write(`wrote ${spec.output}\n`);
  return 0;
}

process.exit(main(process.argv));
