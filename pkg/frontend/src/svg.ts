import { Style } from "./style.js";

/**
 * Minimal SVG scene builder: linear scales, nice ticks, and the
 * handful of primitives the figures need. Coordinates are emitted at
 * fixed precision so identical inputs produce identical bytes.
 */

export function fmt(v: number): string {
  if (!Number.isFinite(v)) return "0";
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
}

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const scale = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  scale.domain = domain;
  scale.range = range;
  return scale;
}

export function extent(values: number[], padFrac = 0.0): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (lo > hi) {
    lo = 0;
    hi = 1;
  }
  if (lo === hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  const pad = (hi - lo) * padFrac;
  return [lo - pad, hi + pad];
}

export function ticks(domain: [number, number], count = 6): number[] {
  const [lo, hi] = domain;
  const span = hi - lo;
  if (span <= 0) return [lo];
  const raw = span / count;
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  const step = (norm < 1.5 ? 1 : norm < 3.5 ? 2 : norm < 7.5 ? 5 : 10) * mag;
  const out: number[] = [];
  for (let v = Math.ceil(lo / step) * step; v <= hi + step * 1e-9; v += step) {
    out.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return out;
}

function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) return v.toExponential(1);
  return String(parseFloat(v.toPrecision(6)));
}

const escape = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export class Scene {
  private parts: string[] = [];
  readonly style: Style;

  constructor(style: Style) {
    this.style = style;
  }

  push(part: string) {
    this.parts.push(part);
  }

  path(points: Array<[number, number]>, stroke: string, width: number, dash?: string) {
    if (points.length === 0) return;
    const d = points
      .map(([x, y], i) => `${i === 0 ? "M" : "L"}${fmt(x)},${fmt(y)}`)
      .join("");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.push(
      `<path d="${d}" fill="none" stroke="${stroke}" stroke-width="${width}"${dashAttr}/>`
    );
  }

  polygon(points: Array<[number, number]>, fill: string, opacity: number) {
    if (points.length === 0) return;
    const pts = points.map(([x, y]) => `${fmt(x)},${fmt(y)}`).join(" ");
    this.push(`<polygon points="${pts}" fill="${fill}" fill-opacity="${fmt(opacity)}"/>`);
  }

  rect(x: number, y: number, w: number, h: number, fill: string, opacity = 1.0) {
    this.push(
      `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(Math.max(w, 0))}" ` +
        `height="${fmt(Math.max(h, 0))}" fill="${fill}" fill-opacity="${fmt(opacity)}"/>`
    );
  }

  circle(x: number, y: number, r: number, fill: string) {
    this.push(`<circle cx="${fmt(x)}" cy="${fmt(y)}" r="${fmt(r)}" fill="${fill}"/>`);
  }

  line(x1: number, y1: number, x2: number, y2: number, stroke: string, width = 1) {
    this.push(
      `<line x1="${fmt(x1)}" y1="${fmt(y1)}" x2="${fmt(x2)}" y2="${fmt(y2)}" ` +
        `stroke="${stroke}" stroke-width="${width}"/>`
    );
  }

  text(x: number, y: number, s: string, anchor: "start" | "middle" | "end", size?: number) {
    this.push(
      `<text x="${fmt(x)}" y="${fmt(y)}" text-anchor="${anchor}" ` +
        `font-family="${this.style.fontFamily}" font-size="${size ?? this.style.fontSize}" ` +
        `fill="${this.style.axisColor}">${escape(s)}</text>`
    );
  }

  axes(xs: Scale, ys: Scale, xLabel: string, yLabel: string) {
    const st = this.style;
    const [x0, x1] = xs.range;
    const [y0, y1] = ys.range;
    for (const t of ticks(xs.domain)) {
      const px = xs(t);
      this.line(px, y0, px, y1, st.gridColor, 0.5);
      this.line(px, y0, px, y0 + 4, st.axisColor, 1);
      this.text(px, y0 + 16, tickLabel(t), "middle");
    }
    for (const t of ticks(ys.domain)) {
      const py = ys(t);
      this.line(x0, py, x1, py, st.gridColor, 0.5);
      this.line(x0 - 4, py, x0, py, st.axisColor, 1);
      this.text(x0 - 6, py + 4, tickLabel(t), "end");
    }
    this.line(x0, y0, x1, y0, st.axisColor, 1);
    this.line(x0, y0, x0, y1, st.axisColor, 1);
    this.text((x0 + x1) / 2, y0 + 34, xLabel, "middle");
    this.push(
      `<text x="${fmt(16)}" y="${fmt((y0 + y1) / 2)}" text-anchor="middle" ` +
        `font-family="${st.fontFamily}" font-size="${st.fontSize}" fill="${st.axisColor}" ` +
        `transform="rotate(-90 16 ${fmt((y0 + y1) / 2)})">${escape(yLabel)}</text>`
    );
  }

  title(s: string) {
    this.push(
      `<text x="${fmt(this.style.width / 2)}" y="${fmt(20)}" text-anchor="middle" ` +
        `font-family="${this.style.fontFamily}" font-size="${this.style.fontSize + 2}" ` +
        `font-weight="bold" fill="${this.style.axisColor}">${escape(s)}</text>`
    );
  }

  render(): string {
    const st = this.style;
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${st.width}" height="${st.height}" ` +
      `viewBox="0 0 ${st.width} ${st.height}">\n` +
      `<rect width="${st.width}" height="${st.height}" fill="${st.background}"/>\n` +
      this.parts.join("\n") +
      `\n</svg>\n`
    );
  }
}

/** Plot-area scales for the shared margin layout. */
export function frame(style: Style, xDomain: [number, number], yDomain: [number, number]) {
  const { width, height, margin } = style;
  const xs = linearScale(xDomain, [margin.left, width - margin.right]);
  const ys = linearScale(yDomain, [height - margin.bottom, margin.top]);
  return { xs, ys };
}

/** Two-color ramp for heatmap cells; u is clamped to [0, 1]. */
export function ramp(low: string, high: string, u: number): string {
  const c = Math.min(Math.max(u, 0), 1);
  const parse = (hex: string) => [
    parseInt(hex.slice(1, 3), 16),
    parseInt(hex.slice(3, 5), 16),
    parseInt(hex.slice(5, 7), 16),
  ];
  const a = parse(low);
  const b = parse(high);
  const mix = a.map((av, i) => Math.round(av + (b[i] - av) * c));
  return `rgb(${mix[0]},${mix[1]},${mix[2]})`;
}
