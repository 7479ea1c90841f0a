/**
 * Grouped bar figure from a compare CSV: per (point, h) group one bar for
 * the reference benchmark value and one per scheme estimate, every bar
 * labeled with its value (the benchmark label keeps full precision).
 */

import { CompareData, CompareRow } from './csv';
import * as svg from './svg';

export interface BenchmarkFigure {
  svg: string;
}

const FRAME: svg.Frame = { width: 860, height: 520, left: 80, right: 820, top: 60, bottom: 430 };
const AXIS = 'stroke="black" stroke-width="1"';
const GRID = 'stroke="#dddddd" stroke-width="0.5"';
const COLORS = { benchmark: '#444444', transformed: '#cc3311', regularized: '#2266aa' };

function groupLabel(row: CompareRow): string {
  const point = row.pointY === null ? `(${row.pointX})` : `(${row.pointX}, ${row.pointY})`;
  return `${point} h=${row.h}`;
}

export function renderBenchmark(data: CompareData): BenchmarkFigure {
  const rows = data.rows;
  const values = rows.flatMap((r) => [r.benchmark, r.transformed, r.regularized]);
  const vLo = Math.min(0, ...values);
  const vHi = Math.max(0, ...values);
  const pad = 0.15 * (vHi - vLo || 1);
  const sy = new svg.LinearScale(vLo - pad, vHi + pad, FRAME.bottom, FRAME.top);

  const body: string[] = [];
  for (const tick of svg.niceTicks(vLo - pad, vHi + pad)) {
    const py = sy.map(tick);
    body.push(svg.line(FRAME.left, py, FRAME.right, py, GRID));
    body.push(svg.text(FRAME.left - 46, py + 4, svg.fmt(tick)));
  }
  const zero = sy.map(0);
  body.push(svg.line(FRAME.left, zero, FRAME.right, zero, AXIS));
  body.push(svg.line(FRAME.left, FRAME.top, FRAME.left, FRAME.bottom, AXIS));

  const groupWidth = (FRAME.right - FRAME.left) / rows.length;
  const barWidth = Math.min(46, groupWidth / 4);
  rows.forEach((row, g) => {
    const center = FRAME.left + (g + 0.5) * groupWidth;
    const series: Array<[keyof typeof COLORS, number, string]> = [
      ['benchmark', row.benchmark, String(row.benchmark)],
      ['transformed', row.transformed, Number(row.transformed.toPrecision(6)).toString()],
      ['regularized', row.regularized, Number(row.regularized.toPrecision(6)).toString()],
    ];
    series.forEach(([name, value, label], k) => {
      const x = center + (k - 1) * barWidth - barWidth / 2;
      const py = sy.map(value);
      const top = Math.min(py, zero);
      const height = Math.abs(py - zero);
      body.push(svg.rect(x, top, barWidth - 4, height, `fill="${COLORS[name]}"`));
      const ly = value >= 0 ? top - 6 : top + height + 14;
      body.push(svg.text(x - 6, ly, label, 'font-size="10"'));
    });
    body.push(svg.text(center - 40, FRAME.bottom + 22, groupLabel(row), 'font-size="11"'));
  });

  let lx = FRAME.left + 8;
  for (const [name, color] of Object.entries(COLORS)) {
    body.push(svg.rect(lx, 34, 12, 12, `fill="${color}"`));
    body.push(svg.text(lx + 16, 44, name));
    lx += 120;
  }
  body.push(svg.text(FRAME.left, 20, 'benchmark comparison', 'font-size="15"'));
  return { svg: svg.document(FRAME, body) };
}
