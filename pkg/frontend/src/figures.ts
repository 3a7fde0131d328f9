/** Figure assembly: CSV tables in, one SVG document out. */

import { SchemaError, Table, columnsByPrefix, parseCsv, requireColumns } from "./csv.js";
import { Frame, heatmap, linePanel } from "./panels.js";
import { el, svgDocument } from "./svg.js";

export type FigureKind = "fig4" | "fig5" | "fig6" | "cp";

export interface FigureSpec {
  kind: FigureKind;
  /** CSV contents, in the order documented per kind (see INPUTS). */
  inputs: string[];
  title?: string;
}

export const INPUTS: Record<FigureKind, string[]> = {
  fig4: ["map.csv", "timeavg.csv", "trace.csv"],
  fig5: ["spectrum.csv", "trajectories.csv"],
  fig6: ["map.csv", "trace.csv"],
  cp: ["cp_rays.csv"],
};

const WIDTH = 640;

function mapGrid(table: Table): { ts: number[]; deltas: number[]; grid: number[][] } {
  const [t, d, v] = requireColumns(table, ["t_ns", "delta_ghz", "photon"]);
  const ts = [...new Set(t)].sort((a, b) => a - b);
  const deltas = [...new Set(d)].sort((a, b) => a - b);
  const index = new Map<string, number>();
  for (let i = 0; i < t.length; i++) {
    index.set(`${t[i]}|${d[i]}`, v[i]);
  }
  const grid: number[][] = ts.map((tv) =>
    deltas.map((dv) => {
      const val = index.get(`${tv}|${dv}`);
      if (val === undefined) {
        throw new SchemaError(`map is not a full grid: missing (t=${tv}, delta=${dv})`);
      }
      return val;
    }),
  );
  return { ts, deltas, grid };
}

function title(text: string, y: number): string {
  return el("text", {
    x: WIDTH / 2, y,
    "text-anchor": "middle",
    style: "font-family:Helvetica,Arial,sans-serif;font-size:13px;font-weight:bold",
  }, [], text);
}

function renderFig4(inputs: string[], heading: string): string {
  const [mapTable, avgTable, traceTable] = inputs.map(parseCsv);
  const { ts, deltas, grid } = mapGrid(mapTable);
  // grid rows are indexed by time; heatmap wants [iy][ix] with y = time
  const body: string[] = [title(heading, 18)];
  const top: Frame = { x: 70, y: 30, width: 520, height: 190 };
  body.push(...heatmap(top, deltas, ts, grid, "detuning (GHz)", "time (ns)"));

  const [dAvg, avg, base] = requireColumns(avgTable,
    ["delta_ghz", "mean_photon", "baseline_photon"]);
  const mid: Frame = { x: 70, y: 270, width: 520, height: 120 };
  body.push(...linePanel(mid, [
    { x: dAvg, y: avg, color: "#1f4e9c" },
    { x: dAvg, y: base, color: "#999999" },
  ], "detuning (GHz)", "mean photon number"));

  const [tTr, photon] = requireColumns(traceTable, ["t_ns", "photon"]);
  const bottom: Frame = { x: 70, y: 440, width: 520, height: 120 };
  body.push(...linePanel(bottom, [
    { x: tTr, y: photon, color: "#b22222" },
  ], "time (ns)", "photon number at zero detuning"));
  return svgDocument(WIDTH, 610, body);
}

function renderFig5(inputs: string[], heading: string): string {
  const [specTable, trajTable] = inputs.map(parseCsv);
  const [delta, mean, stderr] = requireColumns(specTable,
    ["delta_ghz", "mean", "stderr", "n"]).slice(0, 3);
  const body: string[] = [title(heading, 18)];
  const main: Frame = { x: 70, y: 40, width: 520, height: 260 };
  const lo = Math.min(...mean) - 3 * Math.max(...stderr);
  const hi = Math.max(...mean) + 3 * Math.max(...stderr);
  body.push(...linePanel(main, [
    { x: delta, y: mean, err: stderr, color: "#1f4e9c" },
  ], "detuning (GHz)", "normalized photon number",
    [lo - 0.05 * (hi - lo), hi + 0.05 * (hi - lo)]));

  // inset: released trajectories in the y-z plane
  const [x0, y0, z0, vx, vy, vz, tEnd] = requireColumns(trajTable,
    ["x0_nm", "y0_nm", "z0_nm", "vx_m_s", "vy_m_s", "vz_m_s", "t_end_ns"]);
  void x0;
  void vx;
  const inset: Frame = { x: 390, y: 60, width: 170, height: 110 };
  body.push(el("rect", {
    x: inset.x, y: inset.y, width: inset.width, height: inset.height,
    style: "fill:white;stroke:black;stroke-width:0.8",
  }));
  const n = Math.min(y0.length, 40);
  const ymax = 2500;
  const zmin = -2200;
  const zmax = 1200;
  const px = (y: number) => inset.x + ((y + ymax) / (2 * ymax)) * inset.width;
  const pz = (z: number) => inset.y + inset.height - ((z - zmin) / (zmax - zmin)) * inset.height;
  for (let i = 0; i < n; i++) {
    // nm positions, velocities in m/s over ns horizons -> nm displacements
    const y1 = y0[i] + vy[i] * tEnd[i];
    const z1 = z0[i] + vz[i] * tEnd[i];
    body.push(el("line", {
      x1: px(y0[i]), y1: pz(z0[i]), x2: px(y1), y2: pz(z1),
      style: "stroke:#555555;stroke-width:0.6",
    }));
  }
  body.push(el("rect", {
    x: px(-210), y: pz(125), width: px(210) - px(-210), height: pz(-125) - pz(125),
    style: "fill:#c8a96444;stroke:#8a6d1f;stroke-width:0.8",
  }));
  return svgDocument(WIDTH, 360, body);
}

function renderFig6(inputs: string[], heading: string): string {
  const [mapTable, traceTable] = inputs.map(parseCsv);
  const { ts, deltas, grid } = mapGrid(mapTable);
  const body: string[] = [title(heading, 18)];
  const top: Frame = { x: 70, y: 30, width: 520, height: 220 };
  body.push(...heatmap(top, deltas, ts, grid, "detuning (GHz)", "time (ns)"));
  const [tTr, photon] = requireColumns(traceTable, ["t_ns", "photon"]);
  const bottom: Frame = { x: 70, y: 300, width: 520, height: 130 };
  body.push(...linePanel(bottom, [
    { x: tTr, y: photon, color: "#b22222" },
  ], "time (ns)", "photon number at zero detuning"));
  return svgDocument(WIDTH, 480, body);
}

function renderCp(inputs: string[], heading: string): string {
  const table = parseCsv(inputs[0]);
  const [coord, shift] = requireColumns(table, ["coord_nm", "shift_mhz"]);
  const rayRaw = table.raw.get("ray");
  if (rayRaw === undefined) {
    throw new SchemaError(`missing column 'ray' (file has: ${table.header.join(", ")})`);
  }
  const body: string[] = [title(heading, 18)];
  const frames: Record<string, Frame> = {
    z: { x: 70, y: 40, width: 220, height: 220 },
    y: { x: 370, y: 40, width: 220, height: 220 },
  };
  const labels: Record<string, string> = {
    z: "z above slab surface (nm)",
    y: "y from hole centre (nm)",
  };
  for (const ray of ["z", "y"]) {
    const xs: number[] = [];
    const ys: number[] = [];
    for (let i = 0; i < coord.length; i++) {
      if (rayRaw[i] === ray) {
        xs.push(coord[i]);
        ys.push(shift[i]);
      }
    }
    if (xs.length === 0) {
      throw new SchemaError(`cp_rays.csv has no rows for ray '${ray}'`);
    }
    const lo = Math.min(...ys);
    body.push(...linePanel(frames[ray], [
      { x: xs, y: ys, color: "#1f4e9c" },
    ], labels[ray], "line shift (MHz)", [lo * 1.1, 0]));
  }
  return svgDocument(WIDTH, 320, body);
}

export function render(spec: FigureSpec): string {
  const expected = INPUTS[spec.kind];
  if (expected === undefined) {
    throw new SchemaError(`unknown figure kind '${spec.kind}'`);
  }
  if (spec.inputs.length !== expected.length) {
    throw new SchemaError(
      `${spec.kind} needs ${expected.length} input file(s): ${expected.join(", ")}`,
    );
  }
  const heading = spec.title ?? spec.kind;
  switch (spec.kind) {
    case "fig4":
      return renderFig4(spec.inputs, heading);
    case "fig5":
      return renderFig5(spec.inputs, heading);
    case "fig6":
      return renderFig6(spec.inputs, heading);
    case "cp":
      return renderCp(spec.inputs, heading);
  }
}
