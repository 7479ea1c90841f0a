/**
 * Rate fitting identical to the solver CLI's: rows whose error exceeds
 * three standard errors count as bias dominated, and the slope is the
 * least-squares fit of log(error) against log(h) over those rows in file
 * order.  The arithmetic mirrors the CLI's double-precision evaluation, so
 * the annotated slope reproduces the printed one to well below 1e-9.
 */

import { ConvergenceRow } from './csv';

export function biasDominated(rows: ConvergenceRow[]): boolean[] {
  return rows.map((r) => r.error > 3.0 * r.stderr);
}

function mean(values: number[]): number {
  let total = 0;
  for (const v of values) total += v;
  return total / values.length;
}

export function fitLogLogSlope(hs: number[], errors: number[]): number {
  const lx = hs.map(Math.log);
  const ly = errors.map(Math.log);
  const mx = mean(lx);
  const my = mean(ly);
  let num = 0;
  let den = 0;
  for (let i = 0; i < lx.length; i++) {
    const cx = lx[i] - mx;
    num += cx * (ly[i] - my);
    den += cx * cx;
  }
  return num / den;
}
