/** Declarative figure description loaded from a small JSON file. */

import * as fs from "fs";

import { SchemaError } from "./csv";

export const FIGURE_KINDS = [
  "nmse_vs_p01",
  "alpha_panel",
  "th_panel",
  "eta_panel",
  "psd_panel",
] as const;

export type FigureKind = (typeof FIGURE_KINDS)[number];

export interface FigureInput {
  path: string;
  label?: string;
}

export interface FigureSpec {
  kind: FigureKind;
  inputs: FigureInput[];
  output: string;
  xlabel?: string;
  ylabel?: string;
  title?: string;
}

interface RawSpec {
  kind?: string;
  input?: string;
  inputs?: (string | FigureInput)[];
  output?: string;
  xlabel?: string;
  ylabel?: string;
  title?: string;
}

export function loadSpec(path: string): FigureSpec {
  let raw: RawSpec;
  try {
    raw = JSON.parse(fs.readFileSync(path, "utf-8")) as RawSpec;
  } catch (err) {
    throw new SchemaError(`cannot parse figure spec ${path}: ${err}`);
  }
  if (!raw.kind || !(FIGURE_KINDS as readonly string[]).includes(raw.kind)) {
    throw new SchemaError(
      `figure kind must be one of ${FIGURE_KINDS.join(", ")}; got ${raw.kind}`
    );
  }
  const inputs: FigureInput[] = [];
  if (raw.input) {
    inputs.push({ path: raw.input });
  }
  for (const entry of raw.inputs ?? []) {
    inputs.push(typeof entry === "string" ? { path: entry } : entry);
  }
  if (inputs.length === 0) {
    throw new SchemaError(`figure spec ${path} names no input CSV`);
  }
  if (!raw.output) {
    throw new SchemaError(`figure spec ${path} names no output image path`);
  }
  return {
    kind: raw.kind as FigureKind,
    inputs,
    output: raw.output,
    xlabel: raw.xlabel,
    ylabel: raw.ylabel,
    title: raw.title,
  };
}
