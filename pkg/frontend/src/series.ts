/**
 * Turn harness CSV tables into plotted series.
 *
 * The raw (x, y) arrays hold the CSV values untouched and in row order,
 * so a sidecar round-trip reproduces the file contents exactly.  Sweep
 * panels additionally carry a per-value mean overlay for the connecting
 * line, since sweeps usually hold several trials per sweep value.
 */

import * as path from "path";

import { CsvTable, numericColumn, stringColumn } from "./csv";
import { FigureInput, FigureKind } from "./spec";

export interface Series {
  label: string;
  x: number[];
  y: number[];
  /** derived per-x means used for the connecting line of sweep panels */
  xMean?: number[];
  yMean?: number[];
}

const SWEEP_AXES: Record<string, { x: string; y: string }> = {
  nmse_vs_p01: { x: "sweep_value", y: "nmse_db" },
  alpha_panel: { x: "sweep_value", y: "nmse_db" },
  th_panel: { x: "sweep_value", y: "nmse_db" },
  eta_panel: { x: "sweep_value", y: "nmse_db" },
};

function meansByValue(x: number[], y: number[]): { xMean: number[]; yMean: number[] } {
  const buckets = new Map<number, number[]>();
  for (let i = 0; i < x.length; i++) {
    if (!Number.isFinite(y[i])) continue;
    const list = buckets.get(x[i]) ?? [];
    list.push(y[i]);
    buckets.set(x[i], list);
  }
  const xMean = [...buckets.keys()].sort((a, b) => a - b);
  const yMean = xMean.map((v) => {
    const vals = buckets.get(v)!;
    return vals.reduce((s, t) => s + t, 0) / vals.length;
  });
  return { xMean, yMean };
}

function defaultLabel(input: FigureInput): string {
  return input.label ?? path.basename(input.path).replace(/\.[^.]*$/, "");
}

export function buildSeries(
  kind: FigureKind,
  input: FigureInput,
  table: CsvTable
): Series[] {
  if (kind === "psd_panel") {
    const labels = stringColumn(table, "label");
    const freq = numericColumn(table, "frequency");
    const power = numericColumn(table, "power");
    const order: string[] = [];
    const groups = new Map<string, { x: number[]; y: number[] }>();
    for (let i = 0; i < labels.length; i++) {
      if (!groups.has(labels[i])) {
        groups.set(labels[i], { x: [], y: [] });
        order.push(labels[i]);
      }
      const g = groups.get(labels[i])!;
      g.x.push(freq[i]);
      g.y.push(power[i]);
    }
    return order.map((label) => ({
      label: input.label ? `${input.label} ${label}` : label,
      x: groups.get(label)!.x,
      y: groups.get(label)!.y,
    }));
  }
  const axes = SWEEP_AXES[kind];
  const x = numericColumn(table, axes.x);
  const y = numericColumn(table, axes.y);
  const { xMean, yMean } = meansByValue(x, y);
  return [{ label: defaultLabel(input), x, y, xMean, yMean }];
}

export function axisLabels(kind: FigureKind): { x: string; y: string } {
  switch (kind) {
    case "nmse_vs_p01":
      return { x: "p01", y: "NMSE (dB)" };
    case "alpha_panel":
      return { x: "annealing rate", y: "NMSE (dB)" };
    case "th_panel":
      return { x: "initial threshold", y: "NMSE (dB)" };
    case "eta_panel":
      return { x: "normalized sparsity ratio", y: "NMSE (dB)" };
    case "psd_panel":
      return { x: "frequency (cycles/sample)", y: "power" };
  }
}
