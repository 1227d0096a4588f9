import { readFileSync, existsSync } from "fs";
import { join } from "path";
// papaparse ships CommonJS; only the default export survives node ESM interop.
import Papa from "papaparse";

/**
 * Column-checked CSV loading.
 *
 * Every figure declares the columns it needs up front; a file that is
 * absent or lacks a declared column raises MissingColumnError naming
 * both the file and the column, so a half-written report directory
 * fails loudly instead of rendering an empty figure.
 */

export class MissingColumnError extends Error {
  readonly file: string;
  readonly column: string;

  constructor(file: string, column: string) {
    super(`${file}: missing column "${column}"`);
    this.name = "MissingColumnError";
    this.file = file;
    this.column = column;
  }
}

export type Row = Record<string, number | string>;

export interface Table {
  file: string;
  columns: string[];
  rows: Row[];
}

export function parseTable(file: string, text: string, required: string[]): Table {
  const parsed = Papa.parse<Row>(text.trim(), { header: true, dynamicTyping: true });
  const columns = parsed.meta.fields ?? [];
  for (const col of required) {
    if (!columns.includes(col)) {
      throw new MissingColumnError(file, col);
    }
  }
  // Keep only fully populated rows; papaparse emits a ghost row for a
  // trailing newline.
  const rows = parsed.data.filter((r) =>
    required.every((col) => r[col] !== null && r[col] !== undefined)
  );
  return { file, columns, rows };
}

export function loadTable(dir: string, file: string, required: string[]): Table {
  const path = join(dir, file);
  if (!existsSync(path)) {
    // A missing file is reported as its first required column missing;
    // the error still names the file, which is the actionable part.
    throw new MissingColumnError(file, required[0]);
  }
  return parseTable(file, readFileSync(path, "utf8"), required);
}

export function column(table: Table, name: string): number[] {
  return table.rows.map((r) => Number(r[name]));
}
