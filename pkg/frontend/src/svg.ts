/** Minimal deterministic SVG assembly: plain strings, fixed precision. */

export function fmt(x: number): string {
  if (!Number.isFinite(x)) {
    return "0";
  }
  const s = x.toFixed(3);
  return s === "-0.000" ? "0.000" : s;
}

export function el(
  tag: string,
  attrs: Record<string, string | number>,
  children: string[] = [],
  text?: string,
): string {
  const a = Object.entries(attrs)
    .map(([k, v]) => `${k}="${typeof v === "number" ? fmt(v) : v}"`)
    .join(" ");
  if (children.length === 0 && text === undefined) {
    return `<${tag} ${a}/>`;
  }
  return `<${tag} ${a}>${text ?? ""}${children.join("")}</${tag}>`;
}

export function svgDocument(width: number, height: number, body: string[]): string {
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}">` +
    `<rect x="0" y="0" width="${width}" height="${height}" fill="white"/>` +
    body.join("") +
    `</svg>\n`
  );
}

export interface Scale {
  (value: number): number;
  domain: [number, number];
  range: [number, number];
}

export function linearScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 === 0 ? 1 : d1 - d0;
  const f = ((value: number) => r0 + ((value - d0) / span) * (r1 - r0)) as Scale;
  f.domain = domain;
  f.range = range;
  return f;
}

/** 4-6 round tick positions covering the domain. */
export function ticks([lo, hi]: [number, number], n = 5): number[] {
  if (lo === hi) {
    return [lo];
  }
  const step = Math.pow(10, Math.floor(Math.log10((hi - lo) / n)));
  const err = (hi - lo) / n / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = mult * step;
  const start = Math.ceil(lo / s) * s;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-12 * Math.abs(hi); v += s) {
    out.push(Math.abs(v) < s * 1e-9 ? 0 : v);
  }
  return out;
}

export function tickLabel(v: number): string {
  if (v === 0) {
    return "0";
  }
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    return v.toExponential(1);
  }
  return `${Number(v.toPrecision(4))}`;
}
