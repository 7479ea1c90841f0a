/**
 * Log-log error-versus-step-size figure: one marker per CSV row with a
 * +-3 stderr bar, filled when the row is bias dominated (those rows feed
 * the fit), hollow when noise dominated; the fitted line and its slope
 * annotation; a dashed square-root guide line for visual comparison with
 * the expected weak rate.
 */

import { ConvergenceData } from './csv';
import { TooFewPoints } from './errors';
import { biasDominated, fitLogLogSlope } from './slope';
import * as svg from './svg';

export interface ConvergenceFigure {
  svg: string;
  slope: number;
  usedCount: number;
}

const FRAME: svg.Frame = { width: 760, height: 520, left: 80, right: 710, top: 50, bottom: 450 };
const AXIS = 'stroke="black" stroke-width="1"';
const GRID = 'stroke="#dddddd" stroke-width="0.5"';
const BAR = 'stroke="#2266aa" stroke-width="1.2"';
const FIT = 'stroke="#cc3311" stroke-width="1.5"';
const GUIDE = 'stroke="#888888" stroke-width="1.2" stroke-dasharray="6 4"';

function log10(v: number): number {
  return Math.log10(v);
}

export function renderConvergence(data: ConvergenceData): ConvergenceFigure {
  const rows = data.rows;
  const used = biasDominated(rows);
  const usedCount = used.filter(Boolean).length;
  if (usedCount < 3) {
    throw new TooFewPoints(
      `need at least 3 rows with error > 3*stderr, found ${usedCount} of ${rows.length}: ` +
        'the study is noise dominated; increase the path count or coarsen the step sizes',
    );
  }
  const slope = fitLogLogSlope(
    rows.filter((_, i) => used[i]).map((r) => r.h),
    rows.filter((_, i) => used[i]).map((r) => r.error),
  );

  const xs = rows.map((r) => log10(r.h));
  const lows = rows.map((r) => Math.max(r.error - 3 * r.stderr, r.error * 1e-3));
  const highs = rows.map((r) => r.error + 3 * r.stderr);
  const ys = rows.map((r) => log10(r.error));
  const xLo = Math.min(...xs) - 0.3;
  const xHi = Math.max(...xs) + 0.3;
  const yLo = Math.min(...lows.map(log10), ...ys) - 0.4;
  const yHi = Math.max(...highs.map(log10), ...ys) + 0.4;
  const sx = new svg.LinearScale(xLo, xHi, FRAME.left, FRAME.right);
  const sy = new svg.LinearScale(yLo, yHi, FRAME.bottom, FRAME.top);

  const body: string[] = [];
  for (const tick of svg.decadeTicks(xLo, xHi)) {
    const px = sx.map(tick);
    body.push(svg.line(px, FRAME.top, px, FRAME.bottom, GRID));
    body.push(svg.text(px - 14, FRAME.bottom + 18, `1e${tick}`));
  }
  for (const tick of svg.decadeTicks(yLo, yHi)) {
    const py = sy.map(tick);
    body.push(svg.line(FRAME.left, py, FRAME.right, py, GRID));
    body.push(svg.text(FRAME.left - 44, py + 4, `1e${tick}`));
  }
  body.push(svg.line(FRAME.left, FRAME.bottom, FRAME.right, FRAME.bottom, AXIS));
  body.push(svg.line(FRAME.left, FRAME.top, FRAME.left, FRAME.bottom, AXIS));
  body.push(svg.text((FRAME.left + FRAME.right) / 2 - 40, FRAME.bottom + 38, 'step size h'));
  body.push(
    svg.text(18, (FRAME.top + FRAME.bottom) / 2, '|error|',
      `transform="rotate(-90 18 ${(FRAME.top + FRAME.bottom) / 2})"`),
  );

  rows.forEach((row, i) => {
    const px = sx.map(xs[i]);
    body.push(svg.line(px, sy.map(log10(lows[i])), px, sy.map(log10(highs[i])), BAR));
    const marker = used[i]
      ? 'fill="#2266aa" stroke="none"'
      : 'fill="white" stroke="#2266aa" stroke-width="1.2"';
    body.push(svg.circle(px, sy.map(ys[i]), 4, marker));
  });

  // Fitted line through the centroid of the used points (log10 space; a
  // ratio of logarithms, so the slope value is base free).
  const ux = xs.filter((_, i) => used[i]);
  const uy = ys.filter((_, i) => used[i]);
  const cx = ux.reduce((a, b) => a + b, 0) / ux.length;
  const cy = uy.reduce((a, b) => a + b, 0) / uy.length;
  const fx0 = Math.min(...ux) - 0.15;
  const fx1 = Math.max(...ux) + 0.15;
  body.push(
    svg.line(sx.map(fx0), sy.map(cy + slope * (fx0 - cx)), sx.map(fx1),
      sy.map(cy + slope * (fx1 - cx)), FIT),
  );
  // Square-root guide line, offset below the data.
  const g0 = cy - 0.35 + 0.5 * (fx0 - cx);
  const g1 = cy - 0.35 + 0.5 * (fx1 - cx);
  body.push(svg.line(sx.map(fx0), sy.map(g0), sx.map(fx1), sy.map(g1), GUIDE));
  body.push(svg.text(sx.map(fx1) - 112, sy.map(g1) + 16, 'h^(1/2) guide', 'fill="#666666"'));

  const preset = /preset=(\S+)/.exec(data.meta)?.[1] ?? '';
  body.push(svg.text(FRAME.left, 24, `weak error vs step size ${preset ? `(${preset})` : ''}`,
    'font-size="15"'));
  body.push(
    svg.text(FRAME.left + 10, FRAME.top + 20,
      `slope ${slope.toPrecision(12)} over ${usedCount} points`, 'fill="#cc3311"'),
  );
  return { svg: svg.document(FRAME, body), slope, usedCount };
}
