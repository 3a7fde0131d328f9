/** Strict CSV handling for the simulator's output schemas. */

export interface Table {
  header: string[];
  /** column-major numeric data, keyed by header name */
  columns: Map<string, number[]>;
  /** raw string cells for non-numeric columns (e.g. termination labels) */
  raw: Map<string, string[]>;
  nRows: number;
}

export class SchemaError extends Error {}

export function parseCsv(text: string): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new SchemaError("empty CSV file");
  }
  const header = lines[0].split(",").map((h) => h.trim());
  const columns = new Map<string, number[]>();
  const raw = new Map<string, string[]>();
  for (const name of header) {
    columns.set(name, []);
    raw.set(name, []);
  }
  for (let i = 1; i < lines.length; i++) {
    const cells = lines[i].split(",");
    if (cells.length !== header.length) {
      throw new SchemaError(
        `row ${i} has ${cells.length} cells, expected ${header.length}`,
      );
    }
    for (let j = 0; j < header.length; j++) {
      raw.get(header[j])!.push(cells[j]);
      columns.get(header[j])!.push(Number(cells[j]));
    }
  }
  return { header, columns, raw, nRows: lines.length - 1 };
}

/** Fetch named numeric columns, failing loudly with the missing column. */
export function requireColumns(table: Table, names: string[]): number[][] {
  const out: number[][] = [];
  for (const name of names) {
    const col = table.columns.get(name);
    if (col === undefined) {
      throw new SchemaError(
        `missing column '${name}' (file has: ${table.header.join(", ")})`,
      );
    }
    if (col.some((v) => Number.isNaN(v))) {
      const row = col.findIndex((v) => Number.isNaN(v));
      throw new SchemaError(`column '${name}' has a non-numeric value at row ${row}`);
    }
    out.push(col);
  }
  return out;
}

/** Columns matching a prefix, in header order (e.g. atom_excitation_*). */
export function columnsByPrefix(table: Table, prefix: string): string[] {
  return table.header.filter((h) => h.startsWith(prefix));
}
