/** Reusable axis/heat-map/line panels built on the SVG helpers. */

import { rgbCss, viridis } from "./color.js";
import { Scale, el, fmt, linearScale, tickLabel, ticks } from "./svg.js";

export interface Frame {
  x: number;
  y: number;
  width: number;
  height: number;
}

const AXIS_STYLE = "stroke:black;stroke-width:1;fill:none";
const FONT = "font-family:Helvetica,Arial,sans-serif;font-size:11px";

export function axes(
  frame: Frame,
  xScale: Scale,
  yScale: Scale,
  xLabel: string,
  yLabel: string,
): string[] {
  const parts: string[] = [];
  parts.push(
    el("rect", {
      x: frame.x, y: frame.y, width: frame.width, height: frame.height,
      style: AXIS_STYLE,
    }),
  );
  for (const t of ticks(xScale.domain)) {
    const px = xScale(t);
    parts.push(el("line", {
      x1: px, y1: frame.y + frame.height, x2: px,
      y2: frame.y + frame.height + 4, style: AXIS_STYLE,
    }));
    parts.push(el("text", {
      x: px, y: frame.y + frame.height + 16,
      "text-anchor": "middle", style: FONT,
    }, [], tickLabel(t)));
  }
  for (const t of ticks(yScale.domain, 4)) {
    const py = yScale(t);
    parts.push(el("line", {
      x1: frame.x - 4, y1: py, x2: frame.x, y2: py, style: AXIS_STYLE,
    }));
    parts.push(el("text", {
      x: frame.x - 7, y: py + 4, "text-anchor": "end", style: FONT,
    }, [], tickLabel(t)));
  }
  parts.push(el("text", {
    x: frame.x + frame.width / 2, y: frame.y + frame.height + 32,
    "text-anchor": "middle", style: FONT,
  }, [], xLabel));
  parts.push(el("text", {
    x: frame.x - 48, y: frame.y + frame.height / 2, "text-anchor": "middle",
    style: FONT,
    transform: `rotate(-90 ${fmt(frame.x - 48)} ${fmt(frame.y + frame.height / 2)})`,
  }, [], yLabel));
  return parts;
}

/** Regular-grid heat map; values indexed [iy][ix]. */
export function heatmap(
  frame: Frame,
  xs: number[],
  ys: number[],
  values: number[][],
  xLabel: string,
  yLabel: string,
): string[] {
  let vmax = -Infinity;
  let vmin = Infinity;
  for (const row of values) {
    for (const v of row) {
      if (v > vmax) vmax = v;
      if (v < vmin) vmin = v;
    }
  }
  if (!Number.isFinite(vmin) || vmax === vmin) {
    vmax = vmin + 1;
  }
  const cw = frame.width / xs.length;
  const ch = frame.height / ys.length;
  const parts: string[] = [];
  for (let iy = 0; iy < ys.length; iy++) {
    for (let ix = 0; ix < xs.length; ix++) {
      const t = (values[iy][ix] - vmin) / (vmax - vmin);
      parts.push(el("rect", {
        x: frame.x + ix * cw,
        y: frame.y + frame.height - (iy + 1) * ch,
        width: cw + 0.5,
        height: ch + 0.5,
        fill: rgbCss(viridis(t)),
      }));
    }
  }
  const xScale = linearScale([xs[0], xs[xs.length - 1]],
                             [frame.x, frame.x + frame.width]);
  const yScale = linearScale([ys[0], ys[ys.length - 1]],
                             [frame.y + frame.height, frame.y]);
  parts.push(...axes(frame, xScale, yScale, xLabel, yLabel));
  return parts;
}

export interface Series {
  x: number[];
  y: number[];
  color: string;
  /** optional symmetric error bars */
  err?: number[];
}

export function linePanel(
  frame: Frame,
  series: Series[],
  xLabel: string,
  yLabel: string,
  yDomain?: [number, number],
): string[] {
  const allX = series.flatMap((s) => s.x);
  const allY = series.flatMap((s) => s.y);
  const xd: [number, number] = [Math.min(...allX), Math.max(...allX)];
  const yd: [number, number] = yDomain ?? [
    Math.min(0, Math.min(...allY)),
    Math.max(...allY) * 1.05 || 1,
  ];
  const xScale = linearScale(xd, [frame.x, frame.x + frame.width]);
  const yScale = linearScale(yd, [frame.y + frame.height, frame.y]);
  const parts: string[] = [];
  for (const s of series) {
    const pts = s.x.map((v, i) => `${fmt(xScale(v))},${fmt(yScale(s.y[i]))}`);
    parts.push(el("polyline", {
      points: pts.join(" "),
      style: `stroke:${s.color};stroke-width:1.3;fill:none`,
    }));
    if (s.err) {
      for (let i = 0; i < s.x.length; i++) {
        const px = xScale(s.x[i]);
        parts.push(el("line", {
          x1: px, y1: yScale(s.y[i] - s.err[i]),
          x2: px, y2: yScale(s.y[i] + s.err[i]),
          style: `stroke:${s.color};stroke-width:0.8`,
        }));
      }
    }
  }
  parts.push(...axes(frame, xScale, yScale, xLabel, yLabel));
  return parts;
}
