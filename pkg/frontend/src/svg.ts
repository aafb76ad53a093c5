/**
 * Minimal deterministic SVG builders: linear/log scales, frames, bars,
 * stems and polylines. No DOM, no renderer state; every helper returns a
 * string so output is reproducible byte for byte.
 */

export interface Scale {
  (v: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  const fn = ((v: number) => r0 + ((v - d0) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const lo = Math.log10(domain[0]);
  const hi = Math.log10(domain[1]);
  const span = hi - lo || 1;
  const [r0, r1] = range;
  const fn = ((v: number) => r0 + ((Math.log10(v) - lo) / span) * (r1 - r0)) as Scale;
  fn.domain = domain;
  fn.range = range;
  return fn;
}

export function extent(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  return [lo, hi];
}

const fmt = (v: number): string => {
  const s = v.toFixed(2);
  return s === "-0.00" ? "0.00" : s;
};

export interface PanelBox {
  x: number;
  y: number;
  width: number;
  height: number;
}

export function ticks(lo: number, hi: number, count = 5): number[] {
  const span = hi - lo || 1;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const candidates = [step, 2 * step, 5 * step, 10 * step];
  const chosen = candidates.find((s) => span / s <= count) ?? 10 * step;
  const start = Math.ceil(lo / chosen) * chosen;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * span; v += chosen) {
    out.push(Math.abs(v) < 1e-12 * span ? 0 : v);
  }
  return out;
}

function tickLabel(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 0.01 && a < 10000) {
    return String(parseFloat(v.toPrecision(6)));
  }
  return v.toExponential(0);
}

/** Axis frame with ticks, labels and a caption; contents drawn by caller. */
export function frame(
  box: PanelBox,
  xScale: Scale,
  yScale: Scale,
  opts: { title?: string; xLabel?: string; yLabel?: string; yLog?: boolean } = {},
): string {
  const { x, y, width, height } = box;
  const parts: string[] = [];
  parts.push(
    `<rect x="${fmt(x)}" y="${fmt(y)}" width="${fmt(width)}" height="${fmt(height)}" fill="none" stroke="#222" stroke-width="1"/>`,
  );
  const xTicks = ticks(xScale.domain[0], xScale.domain[1]);
  for (const tv of xTicks) {
    const px = xScale(tv);
    if (px < x - 0.5 || px > x + width + 0.5) continue;
    parts.push(`<line x1="${fmt(px)}" y1="${fmt(y + height)}" x2="${fmt(px)}" y2="${fmt(y + height + 4)}" stroke="#222"/>`);
    parts.push(`<text x="${fmt(px)}" y="${fmt(y + height + 15)}" font-size="9" text-anchor="middle">${tickLabel(tv)}</text>`);
  }
  const yTicks = opts.yLog
    ? logTicks(yScale.domain[0], yScale.domain[1])
    : ticks(yScale.domain[0], yScale.domain[1]);
  for (const tv of yTicks) {
    const py = yScale(tv);
    if (py < y - 0.5 || py > y + height + 0.5) continue;
    parts.push(`<line x1="${fmt(x - 4)}" y1="${fmt(py)}" x2="${fmt(x)}" y2="${fmt(py)}" stroke="#222"/>`);
    parts.push(`<text x="${fmt(x - 6)}" y="${fmt(py + 3)}" font-size="9" text-anchor="end">${tickLabel(tv)}</text>`);
  }
  if (opts.title) {
    parts.push(`<text x="${fmt(x + 4)}" y="${fmt(y + 12)}" font-size="11" font-weight="bold">${opts.title}</text>`);
  }
  if (opts.xLabel) {
    parts.push(`<text x="${fmt(x + width / 2)}" y="${fmt(y + height + 28)}" font-size="10" text-anchor="middle">${opts.xLabel}</text>`);
  }
  if (opts.yLabel) {
    const cx = x - 32;
    const cy = y + height / 2;
    parts.push(`<text x="${fmt(cx)}" y="${fmt(cy)}" font-size="10" text-anchor="middle" transform="rotate(-90 ${fmt(cx)} ${fmt(cy)})">${opts.yLabel}</text>`);
  }
  return parts.join("\n");
}

export function logTicks(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let e = Math.ceil(Math.log10(lo)); Math.pow(10, e) <= hi * (1 + 1e-12); e++) {
    out.push(Math.pow(10, e));
  }
  return out;
}

export function histogramBars(
  edgesLeft: number[],
  edgesRight: number[],
  densities: number[],
  xScale: Scale,
  yScale: Scale,
  fill = "#7f9fc4",
): string {
  const y0 = yScale(Math.max(yScale.domain[0], 0));
  const parts: string[] = [];
  for (let i = 0; i < densities.length; i++) {
    const px = xScale(edgesLeft[i]);
    const pw = Math.max(xScale(edgesRight[i]) - px, 0.1);
    const py = yScale(densities[i]);
    const ph = Math.max(y0 - py, 0);
    if (ph <= 0) continue;
    parts.push(`<rect x="${fmt(px)}" y="${fmt(py)}" width="${fmt(pw)}" height="${fmt(ph)}" fill="${fill}" stroke="none"/>`);
  }
  return parts.join("\n");
}

export function stems(
  xs: number[],
  ys: number[],
  xScale: Scale,
  yScale: Scale,
  baseline: number,
  stroke = "#2e5d8c",
): string {
  const y0 = yScale(baseline);
  const parts: string[] = [];
  for (let i = 0; i < xs.length; i++) {
    const px = xScale(xs[i]);
    const py = yScale(ys[i]);
    parts.push(`<line x1="${fmt(px)}" y1="${fmt(y0)}" x2="${fmt(px)}" y2="${fmt(py)}" stroke="${stroke}" stroke-width="1"/>`);
    parts.push(`<circle cx="${fmt(px)}" cy="${fmt(py)}" r="1.6" fill="${stroke}"/>`);
  }
  return parts.join("\n");
}

/**
 * Polyline with the source values embedded verbatim in data attributes,
 * so an audit can compare plotted points against the CSV exactly.
 * ``plotX`` overrides the drawing positions (e.g. bin midpoints) while
 * the data attributes keep the raw file values.
 */
export function dataPolyline(
  rawX: string[],
  rawY: string[],
  xScale: Scale,
  yScale: Scale,
  opts: { stroke?: string; clipTop?: number; dataRole?: string; plotX?: number[] } = {},
): string {
  const stroke = opts.stroke ?? "#c0392b";
  const pts: string[] = [];
  for (let i = 0; i < rawX.length; i++) {
    const px = xScale(opts.plotX ? opts.plotX[i] : Number(rawX[i]));
    let py = yScale(Number(rawY[i]));
    if (opts.clipTop !== undefined && py < opts.clipTop) py = opts.clipTop;
    pts.push(`${fmt(px)},${fmt(py)}`);
  }
  const role = opts.dataRole ? ` data-role="${opts.dataRole}"` : "";
  return `<polyline${role} data-x="${rawX.join(" ")}" data-y="${rawY.join(" ")}" points="${pts.join(" ")}" fill="none" stroke="${stroke}" stroke-width="1.2"/>`;
}

export function markers(
  xs: number[],
  ys: number[],
  xScale: Scale,
  yScale: Scale,
  fill: string,
): string {
  return xs
    .map((x, i) => `<circle cx="${fmt(xScale(x))}" cy="${fmt(yScale(ys[i]))}" r="2.2" fill="${fill}"/>`)
    .join("\n");
}

export function svgDocument(width: number, height: number, body: string): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    body,
    "</svg>",
  ].join("\n");
}
