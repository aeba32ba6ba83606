/**
 * CLI: render a figure described by a small JSON spec file.
 *
 *   node dist/render.js --spec figure.json
 *
 * Writes the SVG image at the spec's output path and a JSON data sidecar
 * at <output>.json holding the exact plotted arrays, so figures can be
 * verified without image diffing.  Inputs are never modified.
 */

import * as fs from "fs";

import { readCsv, SchemaError } from "./csv";
import { axisLabels, buildSeries, Series } from "./series";
import { FigureSpec, loadSpec } from "./spec";
import { renderSvg } from "./svg";

export interface Sidecar {
  kind: string;
  output: string;
  xlabel: string;
  ylabel: string;
  series: Series[];
}

export function render(spec: FigureSpec): Sidecar {
  const seriesList: Series[] = [];
  for (const input of spec.inputs) {
    const table = readCsv(input.path);
    seriesList.push(...buildSeries(spec.kind, input, table));
  }
  const defaults = axisLabels(spec.kind);
  const xlabel = spec.xlabel ?? defaults.x;
  const ylabel = spec.ylabel ?? defaults.y;
  const svg = renderSvg(seriesList, xlabel, ylabel, spec.title);
  fs.writeFileSync(spec.output, svg);
  const sidecar: Sidecar = {
    kind: spec.kind,
    output: spec.output,
    xlabel,
    ylabel,
    series: seriesList,
  };
  fs.writeFileSync(
    spec.output + ".json",
    JSON.stringify(sidecar, (_key, value) =>
      typeof value === "number" && !Number.isFinite(value) ? null : value
    , 1) + "\n"
  );
  return sidecar;
}

export function main(argv: string[]): number {
  const specIdx = argv.indexOf("--spec");
  if (specIdx < 0 || specIdx + 1 >= argv.length) {
    process.stderr.write("usage: render --spec <figure-spec.json>\n");
    return 2;
  }
  try {
    const spec = loadSpec(argv[specIdx + 1]);
    render(spec);
    process.stdout.write(`wrote ${spec.output} and ${spec.output}.json\n`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      process.stderr.write(`schema error: ${err.message}\n`);
      return 1;
    }
    process.stderr.write(`error: ${err}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
