/** Minimal deterministic SVG assembly: no DOM, no randomness, plain text. */

export interface Frame {
  width: number;
  height: number;
  left: number;
  right: number;
  top: number;
  bottom: number;
}

export class LinearScale {
  constructor(
    readonly d0: number,
    readonly d1: number,
    readonly r0: number,
    readonly r1: number,
  ) {}

  map(v: number): number {
    const t = (v - this.d0) / (this.d1 - this.d0);
    return this.r0 + t * (this.r1 - this.r0);
  }
}

export function fmt(v: number): string {
  return Number(v.toPrecision(6)).toString();
}

export function esc(text: string): string {
  return text.replace(/&/g, '&amp;').replace(/</g, '&lt;').replace(/>/g, '&gt;');
}

export function line(x1: number, y1: number, x2: number, y2: number, style: string): string {
  return `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ${style}/>`;
}

export function circle(cx: number, cy: number, r: number, style: string): string {
  return `<circle cx="${fmt(cx)}" cy="${fmt(cy)}" r="${r}" ${style}/>`;
}

export function rect(x: number, y: number, w: number, h: number, style: string): string {
  return `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(w)}" height="${fmt(h)}" ${style}/>`;
}

export function text(x: number, y: number, content: string, style = ''): string {
  return `<text x="${fmt(x)}" y="${fmt(y)}" ${style}>${esc(content)}</text>`;
}

export function document(frame: Frame, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${frame.width}" height="${frame.height}" ` +
      `viewBox="0 0 ${frame.width} ${frame.height}" font-family="sans-serif" font-size="12">`,
    rect(0, 0, frame.width, frame.height, 'fill="white"'),
    ...body,
    '</svg>',
  ].join('\n');
}

/** Tick positions at integer powers of ten covering [lo, hi] (log10 data). */
export function decadeTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let k = Math.ceil(lo); k <= Math.floor(hi); k++) ticks.push(k);
  if (ticks.length === 0) ticks.push(Math.round((lo + hi) / 2));
  return ticks;
}

export function niceTicks(lo: number, hi: number, count = 6): number[] {
  const span = hi - lo;
  if (span <= 0) return [lo];
  const raw = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm >= 5 ? 5 : norm >= 2 ? 2 : 1) * mag;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + 1e-12 * span; v += step) {
    ticks.push(Number(v.toPrecision(12)));
  }
  return ticks;
}
