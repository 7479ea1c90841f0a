/**
 * Readers for the solver CLI's CSV outputs.
 *
 * Both formats are plain comma CSVs without quoting.  An optional leading
 * `# key=value ...` comment carries run metadata (used for figure titles).
 * Convergence files hold one row per step size, largest h first; compare
 * files hold one row per (point, h) with the benchmark and the two scheme
 * estimates side by side.
 */

import { MissingColumns } from './errors';

export interface ConvergenceRow {
  h: number;
  error: number;
  stderr: number;
}

export interface ConvergenceData {
  meta: string;
  rows: ConvergenceRow[];
}

export interface CompareRow {
  pointX: number;
  pointY: number | null;
  h: number;
  benchmark: number;
  transformed: number;
  regularized: number;
}

export interface CompareData {
  meta: string;
  rows: CompareRow[];
}

interface Table {
  meta: string;
  header: string[];
  records: string[][];
}

function parseTable(text: string): Table {
  const lines = text.split(/\r?\n/).filter((ln) => ln.length > 0);
  let meta = '';
  let start = 0;
  if (lines.length > 0 && lines[0].startsWith('#')) {
    meta = lines[0].replace(/^#\s*/, '');
    start = 1;
  }
  if (lines.length <= start) {
    throw new MissingColumns('CSV has no header row');
  }
  const header = lines[start].split(',').map((c) => c.trim());
  const records = lines.slice(start + 1).map((ln) => ln.split(','));
  return { meta, header, records };
}

function columnIndex(table: Table, names: string[]): Map<string, number> {
  const index = new Map<string, number>();
  for (const name of names) {
    const i = table.header.indexOf(name);
    if (i < 0) {
      throw new MissingColumns(`column '${name}' missing (found: ${table.header.join(', ')})`);
    }
    index.set(name, i);
  }
  return index;
}

function num(raw: string | undefined, column: string): number {
  if (raw === undefined || raw.trim() === '') {
    throw new MissingColumns(`empty value in column '${column}'`);
  }
  const value = Number(raw);
  if (!Number.isFinite(value)) {
    throw new MissingColumns(`non-numeric value '${raw}' in column '${column}'`);
  }
  return value;
}

export function parseConvergenceCsv(text: string): ConvergenceData {
  const table = parseTable(text);
  const idx = columnIndex(table, ['h', 'error', 'stderr']);
  const rows = table.records.map((rec) => ({
    h: num(rec[idx.get('h')!], 'h'),
    error: num(rec[idx.get('error')!], 'error'),
    stderr: num(rec[idx.get('stderr')!], 'stderr'),
  }));
  for (const row of rows) {
    if (row.stderr < 0) throw new MissingColumns('negative stderr value');
  }
  for (let i = 1; i < rows.length; i++) {
    if (!(rows[i].h < rows[i - 1].h)) {
      throw new MissingColumns('step sizes must be strictly decreasing down the file');
    }
  }
  return { meta: table.meta, rows };
}

export function parseCompareCsv(text: string): CompareData {
  const table = parseTable(text);
  const idx = columnIndex(table, [
    'point_x',
    'point_y',
    'h',
    'benchmark',
    'transformed',
    'regularized',
  ]);
  if (table.records.length === 0) {
    throw new MissingColumns('compare CSV has no data rows');
  }
  const rows = table.records.map((rec) => {
    const rawY = rec[idx.get('point_y')!];
    return {
      pointX: num(rec[idx.get('point_x')!], 'point_x'),
      pointY: rawY === undefined || rawY.trim() === '' ? null : Number(rawY),
      h: num(rec[idx.get('h')!], 'h'),
      benchmark: num(rec[idx.get('benchmark')!], 'benchmark'),
      transformed: num(rec[idx.get('transformed')!], 'transformed'),
      regularized: num(rec[idx.get('regularized')!], 'regularized'),
    };
  });
  return { meta: table.meta, rows };
}
