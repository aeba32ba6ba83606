/**
 * Hand-built SVG line charts: axes, ticks, one polyline + markers per
 * series, legend.  All coordinates are formatted with fixed precision so
 * identical inputs produce byte-identical files.
 */

import { Series } from "./series";

const WIDTH = 760;
const HEIGHT = 480;
const MARGIN = { left: 70, right: 20, top: 40, bottom: 55 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

interface Extent {
  min: number;
  max: number;
}

function fmt(v: number): string {
  return v.toFixed(2);
}

function tickLabel(v: number): string {
  const a = Math.abs(v);
  if (a !== 0 && (a >= 1e4 || a < 1e-3)) return v.toExponential(1);
  return String(Number(v.toPrecision(4)));
}

function extent(values: number[]): Extent {
  let min = Infinity;
  let max = -Infinity;
  for (const v of values) {
    if (!Number.isFinite(v)) continue;
    if (v < min) min = v;
    if (v > max) max = v;
  }
  if (min === Infinity) {
    min = 0;
    max = 1;
  }
  if (min === max) {
    min -= 0.5;
    max += 0.5;
  }
  return { min, max };
}

function ticks(ext: Extent, count = 6): number[] {
  const span = ext.max - ext.min;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / (count * step);
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const start = Math.ceil(ext.min / s) * s;
  const out: number[] = [];
  for (let v = start; v <= ext.max + 1e-12 * span; v += s) {
    out.push(Number(v.toPrecision(12)));
  }
  return out;
}

export function renderSvg(
  seriesList: Series[],
  xlabel: string,
  ylabel: string,
  title?: string
): string {
  const xs = seriesList.flatMap((s) => s.x);
  const ys = seriesList.flatMap((s) => s.y).filter((v) => Number.isFinite(v));
  const xExt = extent(xs);
  const yExt = extent(ys);
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (v: number) => MARGIN.left + ((v - xExt.min) / (xExt.max - xExt.min)) * plotW;
  const sy = (v: number) => MARGIN.top + plotH - ((v - yExt.min) / (yExt.max - yExt.min)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333" stroke-width="1"/>`
  );
  for (const t of ticks(xExt)) {
    const px = sx(t);
    parts.push(
      `<line x1="${fmt(px)}" y1="${MARGIN.top + plotH}" x2="${fmt(px)}" y2="${MARGIN.top + plotH + 5}" stroke="#333"/>`
    );
    parts.push(
      `<text x="${fmt(px)}" y="${MARGIN.top + plotH + 20}" font-size="12" text-anchor="middle" font-family="sans-serif">${tickLabel(t)}</text>`
    );
  }
  for (const t of ticks(yExt)) {
    const py = sy(t);
    parts.push(
      `<line x1="${MARGIN.left - 5}" y1="${fmt(py)}" x2="${MARGIN.left}" y2="${fmt(py)}" stroke="#333"/>`
    );
    parts.push(
      `<text x="${MARGIN.left - 9}" y="${fmt(py + 4)}" font-size="12" text-anchor="end" font-family="sans-serif">${tickLabel(t)}</text>`
    );
  }
  parts.push(
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 12}" font-size="14" text-anchor="middle" font-family="sans-serif">${xlabel}</text>`
  );
  parts.push(
    `<text x="18" y="${MARGIN.top + plotH / 2}" font-size="14" text-anchor="middle" font-family="sans-serif" transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${ylabel}</text>`
  );
  if (title) {
    parts.push(
      `<text x="${MARGIN.left + plotW / 2}" y="24" font-size="15" text-anchor="middle" font-family="sans-serif">${title}</text>`
    );
  }

  seriesList.forEach((series, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    const lineX = series.xMean ?? series.x;
    const lineY = series.yMean ?? series.y;
    const pts: string[] = [];
    for (let i = 0; i < lineX.length; i++) {
      if (!Number.isFinite(lineY[i])) continue;
      pts.push(`${fmt(sx(lineX[i]))},${fmt(sy(lineY[i]))}`);
    }
    if (pts.length > 1) {
      parts.push(
        `<polyline points="${pts.join(" ")}" fill="none" stroke="${color}" stroke-width="1.8"/>`
      );
    }
    for (let i = 0; i < series.x.length; i++) {
      if (!Number.isFinite(series.y[i])) continue;
      parts.push(
        `<circle cx="${fmt(sx(series.x[i]))}" cy="${fmt(sy(series.y[i]))}" r="2.6" fill="${color}" fill-opacity="0.6"/>`
      );
    }
    const ly = MARGIN.top + 14 + 18 * idx;
    parts.push(
      `<line x1="${MARGIN.left + 10}" y1="${ly - 4}" x2="${MARGIN.left + 34}" y2="${ly - 4}" stroke="${color}" stroke-width="1.8"/>`
    );
    parts.push(
      `<text x="${MARGIN.left + 40}" y="${ly}" font-size="12" font-family="sans-serif">${series.label}</text>`
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
