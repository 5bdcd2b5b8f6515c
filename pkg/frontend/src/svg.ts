/**
 * Minimal deterministic SVG chart primitives.
 *
 * No DOM, no randomness, no timestamps: the same data always yields the
 * same bytes, which is what the golden-file tests pin down.
 */

export interface Rect {
  x: number;
  y: number;
  width: number;
  height: number;
}

export type Scale = (v: number) => number;

const FMT = (v: number): string => {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1).replace("e+", "e");
  return Number(v.toPrecision(4)).toString();
};

export function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  return (v) => outLo + ((v - lo) / span) * (outHi - outLo);
}

export function logScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const llo = Math.log10(lo);
  const span = Math.log10(hi) - llo || 1;
  return (v) => outLo + ((Math.log10(v) - llo) / span) * (outHi - outLo);
}

export function linearTicks(lo: number, hi: number, n = 5): number[] {
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / n)));
  const err = span / n / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    ticks.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return ticks;
}

export function logTicks(lo: number, hi: number): number[] {
  const ticks: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); e <= Math.floor(Math.log10(hi)); e++) {
    ticks.push(Math.pow(10, e));
  }
  if (ticks.length > 8) {
    const stride = Math.ceil(ticks.length / 8);
    return ticks.filter((_, i) => i % stride === 0);
  }
  return ticks;
}

export const PALETTE = ["#1f6fb2", "#d2462e", "#2c8a4b", "#8c5fb0", "#b58a1e", "#3a3a3a"];

export class SvgBuilder {
  private parts: string[] = [];

  constructor(
    readonly width: number,
    readonly height: number,
  ) {
    this.parts.push(
      `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
        `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
      `<rect width="${width}" height="${height}" fill="#ffffff"/>`,
    );
  }

  raw(s: string): void {
    this.parts.push(s);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, w = 1): void {
    this.parts.push(
      `<line x1="${r2(x1)}" y1="${r2(y1)}" x2="${r2(x2)}" y2="${r2(y2)}" ` +
        `stroke="${stroke}" stroke-width="${w}"/>`,
    );
  }

  polyline(pts: Array<[number, number]>, stroke: string, w = 1.5): void {
    const d = pts.map(([x, y]) => `${r2(x)},${r2(y)}`).join(" ");
    this.parts.push(
      `<polyline points="${d}" fill="none" stroke="${stroke}" stroke-width="${w}"/>`,
    );
  }

  circle(x: number, y: number, radius: number, fill: string): void {
    this.parts.push(`<circle cx="${r2(x)}" cy="${r2(y)}" r="${radius}" fill="${fill}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string): void {
    this.parts.push(
      `<rect x="${r2(x)}" y="${r2(y)}" width="${r2(w)}" height="${r2(h)}" fill="${fill}"/>`,
    );
  }

  text(x: number, y: number, s: string, opts: { size?: number; anchor?: string; fill?: string } = {}): void {
    const size = opts.size ?? 11;
    const anchor = opts.anchor ?? "start";
    const fill = opts.fill ?? "#222222";
    this.parts.push(
      `<text x="${r2(x)}" y="${r2(y)}" font-size="${size}" text-anchor="${anchor}" ` +
        `fill="${fill}">${esc(s)}</text>`,
    );
  }

  render(): string {
    return this.parts.join("\n") + "\n</svg>\n";
  }
}

function r2(v: number): string {
  return (Math.round(v * 100) / 100).toString();
}

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export interface AxesOptions {
  xLabel: string;
  yLabel: string;
  yLog?: boolean;
  title?: string;
}

/** Draw axes with ticks inside `area`; returns the x/y scales. */
export function drawAxes(
  svg: SvgBuilder,
  area: Rect,
  xDomain: [number, number],
  yDomain: [number, number],
  opts: AxesOptions,
): { x: Scale; y: Scale } {
  const x = linearScale(xDomain[0], xDomain[1], area.x, area.x + area.width);
  const y = opts.yLog
    ? logScale(yDomain[0], yDomain[1], area.y + area.height, area.y)
    : linearScale(yDomain[0], yDomain[1], area.y + area.height, area.y);

  svg.line(area.x, area.y + area.height, area.x + area.width, area.y + area.height, "#333");
  svg.line(area.x, area.y, area.x, area.y + area.height, "#333");

  for (const t of linearTicks(xDomain[0], xDomain[1])) {
    const px = x(t);
    svg.line(px, area.y + area.height, px, area.y + area.height + 4, "#333");
    svg.text(px, area.y + area.height + 16, FMT(t), { anchor: "middle", size: 10 });
  }
  const yTicks = opts.yLog ? logTicks(yDomain[0], yDomain[1]) : linearTicks(yDomain[0], yDomain[1]);
  for (const t of yTicks) {
    const py = y(t);
    svg.line(area.x - 4, py, area.x, py, "#333");
    svg.text(area.x - 7, py + 3.5, FMT(t), { anchor: "end", size: 10 });
  }

  svg.text(area.x + area.width / 2, area.y + area.height + 32, opts.xLabel, {
    anchor: "middle",
  });
  svg.raw(
    `<text x="${r2(area.x - 44)}" y="${r2(area.y + area.height / 2)}" font-size="11" ` +
      `text-anchor="middle" fill="#222222" transform="rotate(-90 ${r2(area.x - 44)} ` +
      `${r2(area.y + area.height / 2)})">${esc(opts.yLabel)}</text>`,
  );
  if (opts.title) {
    svg.text(area.x + area.width / 2, area.y - 8, opts.title, { anchor: "middle", size: 13 });
  }
  return { x, y };
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isNaN(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo === Infinity) return [0, 1];
  if (lo === hi) return [lo - 0.5, hi + 0.5];
  return [lo, hi];
}
