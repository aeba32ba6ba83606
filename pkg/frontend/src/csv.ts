/**
 * Minimal CSV reading for the harness outputs: comma-separated, dot
 * decimals, one header row, no quoting (the harness never emits commas
 * inside fields).
 */

import * as fs from "fs";

export class SchemaError extends Error {}

export interface CsvTable {
  path: string;
  columns: string[];
  rows: string[][];
}

export function readCsv(path: string): CsvTable {
  const text = fs.readFileSync(path, "utf-8");
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  if (lines.length === 0) {
    throw new SchemaError(`empty CSV: ${path}`);
  }
  const columns = lines[0].split(",");
  const rows = lines.slice(1).map((ln) => ln.split(","));
  if (rows.length === 0) {
    throw new SchemaError(`CSV has a header but no data rows: ${path}`);
  }
  return { path, columns, rows };
}

// the Python harness prints non-finite floats as inf/-inf/nan
const SPECIAL: Record<string, number> = {
  inf: Infinity,
  "-inf": -Infinity,
  nan: NaN,
};

/** Numeric column accessor; names the column when it is absent. */
export function numericColumn(table: CsvTable, name: string): number[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`column "${name}" not found in ${table.path}`);
  }
  return table.rows.map((row, i) => {
    const raw = row[idx];
    if (raw in SPECIAL) return SPECIAL[raw];
    const v = Number(raw);
    if (Number.isNaN(v)) {
      throw new SchemaError(
        `column "${name}" has a non-numeric value at data row ${i + 1} of ${table.path}`
      );
    }
    return v;
  });
}

export function stringColumn(table: CsvTable, name: string): string[] {
  const idx = table.columns.indexOf(name);
  if (idx < 0) {
    throw new SchemaError(`column "${name}" not found in ${table.path}`);
  }
  return table.rows.map((row) => row[idx]);
}
