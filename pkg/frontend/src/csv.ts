/**
 * Strict CSV parsing for the documented rellandau output schemas.
 *
 * Each figure kind expects an exact header; anything else is a hard error
 * so a mislabeled file never silently renders as the wrong chart.
 */

export type FigureKind = "moments" | "coupling" | "bounds";

export const HEADERS: Record<FigureKind, string> = {
  moments: "t,mean_px,mean_py,mean_pz,mean_energy,m2,m4,m7,w2_to_ref",
  coupling: "t,w2_sq,envelope,gamma_fitted",
  bounds: "bound_id,n_samples,max_ratio,argmax",
};

export interface Table {
  header: string[];
  rows: string[][];
}

export class CsvError extends Error {}

export function parseCsv(text: string, kind: FigureKind): Table {
  const lines = text.split(/\r?\n/).filter((l) => l.length > 0);
  if (lines.length === 0) {
    throw new CsvError("empty CSV file");
  }
  const expected = HEADERS[kind];
  if (lines[0] !== expected) {
    throw new CsvError(
      `unexpected header for kind '${kind}': got '${lines[0]}', want '${expected}'`,
    );
  }
  const width = expected.split(",").length;
  const rows = lines.slice(1).map((line, i) => {
    const cells = line.split(",");
    if (cells.length !== width) {
      throw new CsvError(`row ${i + 2}: expected ${width} fields, got ${cells.length}`);
    }
    return cells;
  });
  if (rows.length === 0) {
    throw new CsvError("CSV has a header but no data rows");
  }
  return { header: expected.split(","), rows };
}

/** Parse a numeric column; empty cells become NaN (optional columns). */
export function column(table: Table, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new CsvError(`no column '${name}'`);
  }
  return table.rows.map((r, i) => {
    const cell = r[idx];
    if (cell === "") {
      return NaN;
    }
    const v = Number(cell);
    if (Number.isNaN(v)) {
      throw new CsvError(`row ${i + 2}: '${cell}' is not a number in column '${name}'`);
    }
    return v;
  });
}

export function textColumn(table: Table, name: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new CsvError(`no column '${name}'`);
  }
  return table.rows.map((r) => r[idx]);
}
