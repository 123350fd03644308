/** Sweep-CSV ingestion: provenance comments, status filtering, typing. */

import { parse } from "csv-parse/sync";

import { MissingColumn } from "./errors.js";

export interface SweepRow {
  sweep_var: string;
  sweep_value: number;
  scheme: string;
  n_ris: number;
  peb_m: number;
  seed: number;
  status: string;
}

export interface ParsedSweep {
  rows: SweepRow[];
  /** Rows dropped because status != ok, in input order. */
  skipped: SweepRow[];
}

const REQUIRED = ["sweep_var", "sweep_value", "scheme", "n_ris", "peb_m", "seed", "status"];

/** Parse sweep CSV text, separating ok rows from rows to be reported. */
export function parseSweepCsv(text: string): ParsedSweep {
  const records: Record<string, string>[] = parse(text, {
    columns: true,
    comment: "#",
    skip_empty_lines: true,
    trim: true,
  });
  const header = records.length > 0 ? Object.keys(records[0]) : headerOf(text);
  for (const column of REQUIRED) {
    if (!header.includes(column)) {
      throw new MissingColumn(column, header);
    }
  }
  const rows: SweepRow[] = [];
  const skipped: SweepRow[] = [];
  for (const record of records) {
    const row: SweepRow = {
      sweep_var: record.sweep_var,
      sweep_value: Number(record.sweep_value),
      scheme: record.scheme,
      n_ris: Number(record.n_ris),
      peb_m: Number(record.peb_m),
      seed: Number(record.seed),
      status: record.status,
    };
    (row.status === "ok" ? rows : skipped).push(row);
  }
  return { rows, skipped };
}

function headerOf(text: string): string[] {
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (trimmed !== "" && !trimmed.startsWith("#")) {
      return trimmed.split(",").map((s) => s.trim());
    }
  }
  return [];
}
