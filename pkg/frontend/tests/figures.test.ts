import { createHash } from "crypto";
import { readFileSync, readdirSync } from "fs";
import { join } from "path";

import { describe, expect, it } from "vitest";

import { SchemaError } from "../src/csv.js";
import { FigureKind, INPUTS, render } from "../src/figures.js";

const FIXTURES = join(__dirname, "..", "fixtures");

function fixture(...names: string[]): string[] {
  return names.map((n) => readFileSync(join(FIXTURES, n), "utf8"));
}

function sha256(buf: Buffer | string): string {
  return createHash("sha256").update(buf).digest("hex");
}

const CASES: Array<{ kind: FigureKind; files: string[] }> = [
  { kind: "fig4", files: ["fig4_map.csv", "fig4_timeavg.csv", "fig4_trace.csv"] },
  { kind: "fig5", files: ["fig5_spectrum.csv", "fig5_trajectories.csv"] },
  { kind: "fig6", files: ["fig6_map.csv", "fig6_trace.csv"] },
  { kind: "cp", files: ["cp_rays.csv"] },
];

describe("render", () => {
  for (const { kind, files } of CASES) {
    it(`renders ${kind} from the golden CSVs`, () => {
      const svg = render({ kind, inputs: fixture(...files) });
      expect(svg.startsWith("<svg ")).toBe(true);
      expect(svg.trimEnd().endsWith("</svg>")).toBe(true);
      const expectedLabel = kind === "cp" ? "line shift (MHz)" : "detuning (GHz)";
      expect(svg).toContain(expectedLabel);
    });

    it(`${kind} rendering is deterministic`, () => {
      const a = render({ kind, inputs: fixture(...files) });
      const b = render({ kind, inputs: fixture(...files) });
      expect(sha256(a)).toBe(sha256(b));
    });
  }

  it("does not modify its inputs (checksum before and after)", () => {
    const before = new Map<string, string>();
    for (const f of readdirSync(FIXTURES)) {
      before.set(f, sha256(readFileSync(join(FIXTURES, f))));
    }
    for (const { kind, files } of CASES) {
      render({ kind, inputs: fixture(...files) });
    }
    for (const f of readdirSync(FIXTURES)) {
      expect(sha256(readFileSync(join(FIXTURES, f)))).toBe(before.get(f));
    }
  });

  it("time axis is labelled in ns where applicable", () => {
    const svg = render({ kind: "fig4", inputs: fixture("fig4_map.csv", "fig4_timeavg.csv", "fig4_trace.csv") });
    expect(svg).toContain("time (ns)");
  });

  it("fails with the offending column name on schema mismatch", () => {
    const [map, avg, trace] = fixture("fig4_map.csv", "fig4_timeavg.csv", "fig4_trace.csv");
    const broken = avg.replace("mean_photon", "avg_photon");
    expect(() => render({ kind: "fig4", inputs: [map, broken, trace] })).toThrow(
      /missing column 'mean_photon'/,
    );
  });

  it("rejects a wrong input count", () => {
    expect(() => render({ kind: "fig4", inputs: fixture("fig4_map.csv") })).toThrow(
      SchemaError,
    );
  });

  it("declares its expected inputs", () => {
    expect(INPUTS.fig4).toHaveLength(3);
    expect(INPUTS.fig5).toHaveLength(2);
    expect(INPUTS.fig6).toHaveLength(2);
    expect(INPUTS.cp).toHaveLength(1);
  });
});
