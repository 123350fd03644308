import { describe, expect, it } from "vitest";

import { parseSweepCsv } from "../src/csv.js";
import { MissingColumn } from "../src/errors.js";

const HEADER = "sweep_var,sweep_value,scheme,n_ris,peb_m,seed,status";

describe("parseSweepCsv", () => {
  it("parses typed rows and ignores provenance comments", () => {
    const text = [
      "# config=abc seed_base=0 version=0.1.0",
      HEADER,
      "ris_size,5,random,2,5819.45,0,ok",
      "ris_size,10,proposed,2,123.4,1,ok",
    ].join("\n");
    const { rows, skipped } = parseSweepCsv(text);
    expect(rows).toHaveLength(2);
    expect(skipped).toHaveLength(0);
    expect(rows[0]).toEqual({
      sweep_var: "ris_size", sweep_value: 5, scheme: "random",
      n_ris: 2, peb_m: 5819.45, seed: 0, status: "ok",
    });
  });

  it("separates non-ok rows for reporting", () => {
    const text = [
      HEADER,
      "ris_size,5,random,2,5819.45,0,ok",
      "ris_size,5,proposed,2,nan,0,singular",
    ].join("\n");
    const { rows, skipped } = parseSweepCsv(text);
    expect(rows).toHaveLength(1);
    expect(skipped).toHaveLength(1);
    expect(skipped[0].status).toBe("singular");
  });

  it("rejects a header without the required columns", () => {
    const text = "sweep_var,scheme,peb_m\nris_size,random,1.0";
    expect(() => parseSweepCsv(text)).toThrow(MissingColumn);
  });

  it("rejects an empty file", () => {
    expect(() => parseSweepCsv("")).toThrow(MissingColumn);
  });

  it("accepts a header-only file as zero rows", () => {
    const { rows, skipped } = parseSweepCsv(HEADER + "\n");
    expect(rows).toHaveLength(0);
    expect(skipped).toHaveLength(0);
  });
});
