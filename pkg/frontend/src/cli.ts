/** Command line: --kind fig4 --input a.csv --input b.csv ... --output out.svg
 *
 * Exit codes: 0 success, 1 schema or IO failure, 2 usage error.
 */

import { readFileSync, writeFileSync } from "fs";
import { parseArgs } from "util";

import { SchemaError } from "./csv.js";
import { FigureKind, INPUTS, render } from "./figures.js";

export function main(argv: string[]): number {
  let args;
  try {
    args = parseArgs({
      args: argv,
      options: {
        kind: { type: "string" },
        input: { type: "string", multiple: true },
        output: { type: "string" },
        title: { type: "string" },
      },
      allowPositionals: false,
    });
  } catch (err) {
    console.error(`usage error: ${(err as Error).message}`);
    return 2;
  }
  const { kind, input, output, title } = args.values;
  if (!kind || !output || !input || input.length === 0) {
    console.error(
      "usage: render --kind {fig4|fig5|fig6|cp} --input file.csv [--input ...] " +
      "--output out.svg [--title text]",
    );
    return 2;
  }
  if (!(kind in INPUTS)) {
    console.error(`usage error: unknown kind '${kind}'; ` +
      `choose one of ${Object.keys(INPUTS).join(", ")}`);
    return 2;
  }
  if (!output.endsWith(".svg")) {
    console.error(`error: unsupported output format for '${output}'; ` +
      "the renderer emits .svg");
    return 1;
  }
  try {
    const contents = input.map((p) => readFileSync(p, "utf8"));
    const svg = render({ kind: kind as FigureKind, inputs: contents, title });
    writeFileSync(output, svg);
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`schema error: ${err.message}`);
    } else {
      console.error(`error: ${(err as Error).message}`);
    }
    return 1;
  }
  console.log(`wrote ${output}`);
  return 0;
}

process.exit(main(process.argv.slice(2)));
