/** Figure assembly: grouping, scales, and deterministic SVG emission. */

import { EmptyGroup, MissingColumn } from "./errors.js";
import { SweepRow } from "./csv.js";

export interface PlotSpec {
  xColumn: keyof SweepRow;
  logY: boolean;
  title?: string;
}

export interface Series {
  label: string;
  points: { x: number; y: number }[];
}

const NUMERIC_COLUMNS: (keyof SweepRow)[] = ["sweep_value", "n_ris", "peb_m", "seed"];

const PALETTE = [
  "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
  "#e377c2", "#17becf",
];

const WIDTH = 640;
const HEIGHT = 440;
const MARGIN = { left: 70, right: 180, top: 40, bottom: 50 };

/**
 * One series per (scheme, n_ris) group.  When the CSV mixes satellite and
 * base-station rows (scheme suffix "-bs"), the anchor type labels the
 * series instead of the RIS count.
 */
export function groupSeries(rows: SweepRow[], xColumn: keyof SweepRow): Series[] {
  if (!NUMERIC_COLUMNS.includes(xColumn)) {
    throw new MissingColumn(String(xColumn), NUMERIC_COLUMNS.map(String));
  }
  if (rows.length === 0) {
    throw new EmptyGroup("every row was filtered out or the file had none");
  }
  const hasBs = rows.some((r) => r.scheme.endsWith("-bs"));
  const labelOf = (r: SweepRow) => {
    if (hasBs) {
      return r.scheme.endsWith("-bs")
        ? `${r.scheme.slice(0, -3)} (BS)`
        : `${r.scheme} (LEO)`;
    }
    return `${r.scheme} (${r.n_ris} RIS${r.n_ris === 1 ? "" : "s"})`;
  };

  const buckets = new Map<string, Map<number, number[]>>();
  for (const row of rows) {
    const label = labelOf(row);
    const x = Number(row[xColumn]);
    const perX = buckets.get(label) ?? new Map<number, number[]>();
    perX.set(x, [...(perX.get(x) ?? []), row.peb_m]);
    buckets.set(label, perX);
  }

  const series: Series[] = [];
  for (const label of [...buckets.keys()].sort()) {
    const perX = buckets.get(label)!;
    const points = [...perX.entries()]
      .map(([x, ys]) => ({ x, y: median(ys) }))
      .sort((a, b) => a.x - b.x);
    series.push({ label, points });
  }
  return series;
}

function median(values: number[]): number {
  const sorted = [...values].sort((a, b) => a - b);
  const mid = Math.floor(sorted.length / 2);
  return sorted.length % 2 === 1 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2;
}

/** Fixed-precision number for byte-stable output. */
function fmt(value: number): string {
  return Number(value.toPrecision(6)).toString();
}

interface Scale {
  (value: number): number;
}

function linearScale(lo: number, hi: number, outLo: number, outHi: number): Scale {
  const span = hi - lo || 1;
  return (v) => outLo + ((v - lo) / span) * (outHi - outLo);
}

export function renderSvg(series: Series[], spec: PlotSpec): string {
  if (series.length === 0 || series.every((s) => s.points.length === 0)) {
    throw new EmptyGroup("no series to draw");
  }
  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const rawYs = series.flatMap((s) => s.points.map((p) => p.y));
  const toY = spec.logY ? Math.log10 : (v: number) => v;
  const ys = rawYs.map(toY);

  const xScale = linearScale(Math.min(...xs), Math.max(...xs),
    MARGIN.left, WIDTH - MARGIN.right);
  const yLo = Math.min(...ys);
  const yHi = Math.max(...ys);
  const pad = (yHi - yLo || 1) * 0.05;
  const yScale = linearScale(yLo - pad, yHi + pad,
    HEIGHT - MARGIN.bottom, MARGIN.top);

  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" viewBox="0 0 ${WIDTH} ${HEIGHT}">`);
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  if (spec.title) {
    parts.push(`<text x="${WIDTH / 2}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">${escapeXml(spec.title)}</text>`);
  }
  parts.push(axes(xs, yLo - pad, yHi + pad, xScale, yScale, spec.logY));

  series.forEach((s, i) => {
    const color = PALETTE[i % PALETTE.length];
    const path = s.points
      .map((p) => `${fmt(xScale(p.x))},${fmt(yScale(toY(p.y)))}`)
      .join(" ");
    parts.push(`<polyline fill="none" stroke="${color}" stroke-width="1.8" points="${path}"/>`);
    for (const p of s.points) {
      parts.push(`<circle cx="${fmt(xScale(p.x))}" cy="${fmt(yScale(toY(p.y)))}" r="2.6" fill="${color}"/>`);
    }
    const ly = MARGIN.top + 8 + i * 18;
    const lx = WIDTH - MARGIN.right + 14;
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 20}" y2="${ly - 4}" stroke="${color}" stroke-width="1.8"/>`);
    parts.push(`<text x="${lx + 26}" y="${ly}" font-family="sans-serif" font-size="12">${escapeXml(s.label)}</text>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

function axes(xs: number[], yLo: number, yHi: number,
              xScale: Scale, yScale: Scale, logY: boolean): string {
  const parts: string[] = [];
  const x0 = MARGIN.left;
  const x1 = WIDTH - MARGIN.right;
  const y0 = HEIGHT - MARGIN.bottom;
  const y1 = MARGIN.top;
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x1}" y2="${y0}" stroke="black"/>`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0}" y2="${y1}" stroke="black"/>`);

  for (const x of [...new Set(xs)].sort((a, b) => a - b)) {
    const px = xScale(x);
    parts.push(`<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 5}" stroke="black"/>`);
    parts.push(`<text x="${fmt(px)}" y="${y0 + 20}" text-anchor="middle" font-family="sans-serif" font-size="11">${fmt(x)}</text>`);
  }

  const ticks = logY
    ? integerRange(Math.ceil(yLo), Math.floor(yHi)).map((e) => ({ at: e, label: `1e${e}` }))
    : integerRange(0, 4).map((i) => {
        const v = yLo + ((yHi - yLo) * i) / 4;
        return { at: v, label: fmt(v) };
      });
  for (const tick of ticks) {
    const py = yScale(tick.at);
    parts.push(`<line x1="${x0 - 5}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="black"/>`);
    parts.push(`<text x="${x0 - 8}" y="${fmt(py + 4)}" text-anchor="end" font-family="sans-serif" font-size="11">${tick.label}</text>`);
  }
  parts.push(`<text x="${(x0 + x1) / 2}" y="${HEIGHT - 12}" text-anchor="middle" font-family="sans-serif" font-size="12">sweep value</text>`);
  parts.push(`<text x="18" y="${(y0 + y1) / 2}" text-anchor="middle" font-family="sans-serif" font-size="12" transform="rotate(-90 18 ${(y0 + y1) / 2})">PEB [m]</text>`);
  return parts.join("\n");
}

function integerRange(lo: number, hi: number): number[] {
  const out: number[] = [];
  for (let i = lo; i <= hi; i += 1) out.push(i);
  return out.length > 0 ? out : [lo];
}

function escapeXml(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}
