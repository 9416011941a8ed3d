#!/usr/bin/env node
/**
 * plot <figure> --csv <path> [--csv <path> ...] --out <image.svg> [--baseline <pct>]
 *
 * <figure> is one of: success_panels | fees_routing | longterm.
 */

import * as fs from "node:fs";
import * as process from "node:process";

import { loadMetricCsvs } from "./csv.js";
import { FIGURE_KINDS, FigureKind, renderFigureKind } from "./figures.js";

function usage(): never {
  console.error(
    "usage: plot <success_panels|fees_routing|longterm> --csv FILE [--csv FILE ...] --out FILE.svg [--baseline PCT]",
  );
  process.exit(2);
}

export function main(argv: string[]): number {
  if (argv.length === 0) usage();
  const kind = argv[0] as FigureKind;
  if (!FIGURE_KINDS.includes(kind)) usage();
  const csvPaths: string[] = [];
  let out: string | null = null;
  let baseline: number | undefined;
  for (let i = 1; i < argv.length; i += 2) {
    const flag = argv[i];
    const value = argv[i + 1];
    if (value === undefined) usage();
    if (flag === "--csv") csvPaths.push(value);
    else if (flag === "--out") out = value;
    else if (flag === "--baseline") baseline = Number(value);
    else usage();
  }
  if (csvPaths.length === 0 || out === null) usage();
  const rows = loadMetricCsvs(csvPaths);
  fs.writeFileSync(out, renderFigureKind(kind, rows, baseline));
  console.log(`wrote ${out}`);
  return 0;
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url === new URL(`file://${process.argv[1]}`).href;
if (invokedDirectly) {
  try {
    process.exit(main(process.argv.slice(2)));
  } catch (err) {
    console.error(String(err));
    process.exit(1);
  }
}
