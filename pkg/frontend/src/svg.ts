/** Tiny headless SVG scene builder: linear axes, polylines, markers, text. */

export interface Extent {
  min: number;
  max: number;
}

export function extent(values: number[], pad = 0.05): Extent {
  const finite = values.filter(Number.isFinite);
  if (finite.length === 0) return { min: 0, max: 1 };
  let min = Math.min(...finite);
  let max = Math.max(...finite);
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  const span = max - min;
  return { min: min - pad * span, max: max + pad * span };
}

export class Scale {
  constructor(
    readonly domain: Extent,
    readonly range: [number, number],
    readonly log = false,
  ) {}

  apply(v: number): number {
    const [r0, r1] = this.range;
    const d = this.log
      ? (Math.log10(v) - Math.log10(this.domain.min)) /
        (Math.log10(this.domain.max) - Math.log10(this.domain.min))
      : (v - this.domain.min) / (this.domain.max - this.domain.min);
    return r0 + d * (r1 - r0);
  }

  ticks(count = 5): number[] {
    if (this.log) {
      const lo = Math.ceil(Math.log10(this.domain.min));
      const hi = Math.floor(Math.log10(this.domain.max));
      const out: number[] = [];
      for (let e = lo; e <= hi; e++) out.push(10 ** e);
      return out;
    }
    const span = this.domain.max - this.domain.min;
    const step = 10 ** Math.floor(Math.log10(span / count));
    const mult = span / count / step;
    const nice = mult >= 5 ? 5 * step : mult >= 2 ? 2 * step : step;
    const start = Math.ceil(this.domain.min / nice) * nice;
    const out: number[] = [];
    for (let v = start; v <= this.domain.max + 1e-12; v += nice) {
      out.push(Math.abs(v) < 1e-12 ? 0 : v);
    }
    return out;
  }
}

const fmt = (v: number): string =>
  Math.abs(v) >= 1e4 || (Math.abs(v) < 1e-3 && v !== 0)
    ? v.toExponential(1)
    : String(Math.round(v * 1e6) / 1e6);

export class SvgPlot {
  readonly margin = { top: 34, right: 20, bottom: 44, left: 64 };
  private parts: string[] = [];
  readonly xs: Scale;
  readonly ys: Scale;

  constructor(
    readonly width: number,
    readonly height: number,
    xDomain: Extent,
    yDomain: Extent,
    opts: { title?: string; xLabel?: string; yLabel?: string; logY?: boolean; logX?: boolean } = {},
  ) {
    this.xs = new Scale(xDomain, [this.margin.left, width - this.margin.right], opts.logX);
    this.ys = new Scale(yDomain, [height - this.margin.bottom, this.margin.top], opts.logY);
    this.axes(opts);
  }

  private axes(opts: { title?: string; xLabel?: string; yLabel?: string }): void {
    const { left, right, top, bottom } = this.margin;
    const x0 = left;
    const x1 = this.width - right;
    const y0 = this.height - bottom;
    const y1 = top;
    this.parts.push(
      `<rect x="${x0}" y="${y1}" width="${x1 - x0}" height="${y0 - y1}" fill="none" stroke="#333"/>`,
    );
    for (const t of this.xs.ticks()) {
      const px = this.xs.apply(t);
      this.parts.push(
        `<line x1="${px}" y1="${y0}" x2="${px}" y2="${y0 + 5}" stroke="#333"/>`,
        `<text x="${px}" y="${y0 + 18}" text-anchor="middle" font-size="11">${fmt(t)}</text>`,
      );
    }
    for (const t of this.ys.ticks()) {
      const py = this.ys.apply(t);
      this.parts.push(
        `<line x1="${x0 - 5}" y1="${py}" x2="${x0}" y2="${py}" stroke="#333"/>`,
        `<text x="${x0 - 8}" y="${py + 4}" text-anchor="end" font-size="11">${fmt(t)}</text>`,
      );
    }
    if (opts.title) {
      this.parts.push(
        `<text x="${this.width / 2}" y="${top - 12}" text-anchor="middle" font-size="14">${opts.title}</text>`,
      );
    }
    if (opts.xLabel) {
      this.parts.push(
        `<text x="${(x0 + x1) / 2}" y="${this.height - 8}" text-anchor="middle" font-size="12">${opts.xLabel}</text>`,
      );
    }
    if (opts.yLabel) {
      this.parts.push(
        `<text x="14" y="${(y0 + y1) / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 14 ${(y0 + y1) / 2})">${opts.yLabel}</text>`,
      );
    }
  }

  polyline(xs: number[], ys: number[], stroke: string, dash = ""): void {
    const pts = xs
      .map((x, i) => `${this.xs.apply(x).toFixed(2)},${this.ys.apply(ys[i]).toFixed(2)}`)
      .join(" ");
    const dashAttr = dash ? ` stroke-dasharray="${dash}"` : "";
    this.parts.push(
      `<polyline points="${pts}" fill="none" stroke="${stroke}" stroke-width="1.5"${dashAttr}/>`,
    );
  }

  dot(x: number, y: number, fill: string, r = 3, cls = ""): void {
    const clsAttr = cls ? ` class="${cls}"` : "";
    this.parts.push(
      `<circle cx="${this.xs.apply(x).toFixed(2)}" cy="${this.ys.apply(y).toFixed(2)}" r="${r}" fill="${fill}"${clsAttr}/>`,
    );
  }

  vline(x: number, stroke: string, label = ""): void {
    const px = this.xs.apply(x).toFixed(2);
    this.parts.push(
      `<line class="overlay" x1="${px}" y1="${this.margin.top}" x2="${px}" y2="${this.height - this.margin.bottom}" stroke="${stroke}" stroke-dasharray="4,3"/>`,
    );
    if (label) {
      this.parts.push(
        `<text x="${px}" y="${this.margin.top + 12}" text-anchor="middle" font-size="11" fill="${stroke}">${label}</text>`,
      );
    }
  }

  hline(y: number, stroke: string): void {
    const py = this.ys.apply(y).toFixed(2);
    this.parts.push(
      `<line x1="${this.margin.left}" y1="${py}" x2="${this.width - this.margin.right}" y2="${py}" stroke="${stroke}" stroke-dasharray="2,3"/>`,
    );
  }

  text(x: number, y: number, content: string, fill = "#333"): void {
    this.parts.push(
      `<text x="${this.xs.apply(x).toFixed(2)}" y="${this.ys.apply(y).toFixed(2)}" font-size="11" fill="${fill}">${content}</text>`,
    );
  }

  render(): string {
    return (
      `<svg xmlns="http://www.w3.org/2000/svg" width="${this.width}" height="${this.height}" ` +
      `viewBox="0 0 ${this.width} ${this.height}" font-family="sans-serif">\n` +
      this.parts.join("\n") +
      "\n</svg>\n"
    );
  }
}
