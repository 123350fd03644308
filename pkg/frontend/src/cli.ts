#!/usr/bin/env node
/** `risloc-plots render`: sweep CSV in, deterministic SVG figure out. */

import { readFileSync, writeFileSync } from "node:fs";

import { Command } from "commander";

import { parseSweepCsv, SweepRow } from "./csv.js";
import { EmptyGroup, MissingColumn } from "./errors.js";
import { groupSeries, renderSvg } from "./plot.js";

export function render(csvText: string, xColumn: keyof SweepRow, logY: boolean,
                       title?: string): { svg: string; skippedCount: number } {
  const { rows, skipped } = parseSweepCsv(csvText);
  for (const row of skipped) {
    process.stderr.write(
      `skipping ${row.scheme} at ${row.sweep_var}=${row.sweep_value} `
      + `(seed ${row.seed}): status=${row.status}\n`);
  }
  const series = groupSeries(rows, xColumn);
  return { svg: renderSvg(series, { xColumn, logY, title }), skippedCount: skipped.length };
}

export function main(argv: string[]): number {
  const program = new Command();
  let exitCode = 0;
  program
    .name("risloc-plots")
    .exitOverride();
  program
    .command("render")
    .requiredOption("--csv <path>", "sweep CSV produced by the simulator")
    .requiredOption("--x <column>", "numeric column for the x axis")
    .requiredOption("--out <path>", "output SVG path")
    .option("--logy", "log-scale the PEB axis", false)
    .option("--title <text>", "figure title")
    .action((opts: { csv: string; x: string; out: string; logy: boolean; title?: string }) => {
      try {
        const text = readFileSync(opts.csv, "utf-8");
        const { svg } = render(text, opts.x as keyof SweepRow, opts.logy, opts.title);
        writeFileSync(opts.out, svg, "utf-8");
      } catch (err) {
        if (err instanceof MissingColumn || err instanceof EmptyGroup) {
          process.stderr.write(`error: ${err.message}\n`);
          exitCode = 2;
          return;
        }
        if (err instanceof Error && "code" in err) {
          process.stderr.write(`io error: ${err.message}\n`);
          exitCode = 4;
          return;
        }
        throw err;
      }
    });
  try {
    program.parse(argv, { from: "user" });
  } catch {
    return 2;
  }
  return exitCode;
}

const invokedDirectly = process.argv[1] !== undefined
  && import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
