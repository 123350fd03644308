/** Typed failures for CSV ingestion and figure assembly. */

export class MissingColumn extends Error {
  constructor(column: string, available: string[]) {
    super(`missing column "${column}" (have: ${available.join(", ")})`);
    this.name = "MissingColumn";
  }
}

export class EmptyGroup extends Error {
  constructor(detail: string) {
    super(`no plottable rows: ${detail}`);
    this.name = "EmptyGroup";
  }
}
