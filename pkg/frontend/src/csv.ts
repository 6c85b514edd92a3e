import { readFileSync } from "node:fs";

export interface CsvTable {
  header: string[];
  rows: string[][];
}

export class SchemaError extends Error {}

/** Parse a comma-separated file with a header row (no quoting in this schema). */
export function parseCsv(path: string): CsvTable {
  const text = readFileSync(path, "utf8");
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`${path}: empty CSV`);
  }
  const header = lines[0].split(",");
  const rows: string[][] = [];
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(
        `${path}: row ${i + 1} has ${cells.length} cells, header has ${header.length}`,
      );
    }
    rows.push(cells);
  }
  return { header, rows };
}

/** Indexes of `required` in the header; names all missing columns at once. */
export function requireColumns(table: CsvTable, required: string[], path: string): number[] {
  const missing = required.filter((col) => !table.header.includes(col));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path}: missing column(s) ${missing.join(", ")}; found: ${table.header.join(", ")}`,
    );
  }
  return required.map((col) => table.header.indexOf(col));
}
