/** The two figure builders.
 *
 * plotResilienceHops: one column per graph config, delivery rate on the top
 * row and average hops on the bottom row, with the merged violet hop line
 * when one-tree matches the baseline exactly.
 *
 * plotRuntime: mean precompute time against binned link counts for every
 * scheme, annotated with the one-tree/baseline cost ratio.
 *
 * Both render the full SVG and its PNG rasterization in memory before
 * touching the filesystem, so a bad input never leaves a partial image.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { basename, dirname } from "node:path";

import { CellSpec, LegendItem, renderPanelGrid } from "./chart.js";
import { readAggregateCsv, readTimingBins, TimingBin } from "./csv.js";
import { buildPanel, MERGED_COLOR, MERGED_LABEL, Panel, SCHEME_COLORS, SCHEME_ORDER, Series } from "./series.js";

export interface PanelSpec {
  csv: string;
  title?: string;
}

export interface FigureSpec {
  /** One column per graph config, left to right. */
  panels: PanelSpec[];
  /** Extension-free output path; .svg and .png are derived from it. */
  output: string;
}

export interface RuntimeSpec {
  csv: string;
  output: string;
}

function outPaths(output: string): [string, string] {
  const base = output.replace(/\.(svg|png)$/, "");
  return [base + ".svg", base + ".png"];
}

async function writeImages(output: string, svg: string): Promise<string[]> {
  const { svgToPng } = await import("./png.js");
  const [svgPath, pngPath] = outPaths(output);
  const png = svgToPng(svg);
  mkdirSync(dirname(svgPath) || ".", { recursive: true });
  writeFileSync(svgPath, svg);
  writeFileSync(pngPath, png);
  return [svgPath, pngPath];
}

function legendFor(panels: Panel[]): LegendItem[] {
  const items: LegendItem[] = [];
  const seen = new Set<string>();
  const add = (s: Series) => {
    if (!seen.has(s.label)) {
      seen.add(s.label);
      items.push({ label: s.label, color: s.color });
    }
  };
  for (const p of panels) p.resilience.forEach(add);
  for (const p of panels) p.hops.forEach(add);
  return items;
}

export function buildResilienceHopsSvg(spec: FigureSpec): string {
  const panels = spec.panels.map((p) =>
    buildPanel(p.title ?? basename(p.csv).replace(/\.csv$/, ""), readAggregateCsv(p.csv)));

  const xhi = Math.max(...panels.map((p) => p.rates[p.rates.length - 1] ?? 0), 0.1);
  const hopMax = Math.max(
    1,
    ...panels.flatMap((p) => p.hops.flatMap((s) => s.points.map(([, y]) => y))));
  const top: CellSpec[] = panels.map((p, i) => ({
    title: p.title,
    xDomain: [0, xhi],
    yDomain: [0, 1.02],
    series: p.resilience,
    row: "resilience",
    yLabel: i === 0 ? "delivery rate" : undefined,
  }));
  const bottom: CellSpec[] = panels.map((p, i) => ({
    xDomain: [0, xhi],
    yDomain: [0, hopMax * 1.12],
    series: p.hops,
    row: "hops",
    xLabel: "failure rate",
    yLabel: i === 0 ? "avg hops (delivered)" : undefined,
  }));
  return renderPanelGrid([top, bottom], legendFor(panels));
}

export async function plotResilienceHops(spec: FigureSpec): Promise<string[]> {
  return writeImages(spec.output, buildResilienceHopsSvg(spec));
}

function runtimeSeries(bins: TimingBin[]): Series[] {
  const schemes = [...new Set(bins.map((b) => b.scheme))];
  schemes.sort((a, b) => {
    const ra = SCHEME_ORDER.indexOf(a);
    const rb = SCHEME_ORDER.indexOf(b);
    return (ra < 0 ? 99 : ra) - (rb < 0 ? 99 : rb) || a.localeCompare(b);
  });
  return schemes.map((s) => ({
    label: s,
    color: SCHEME_COLORS[s] ?? "#6b7280",
    points: bins.filter((b) => b.scheme === s)
      .sort((a, b) => a.linksLo - b.linksLo)
      .map((b) => [(b.linksLo + b.linksHi) / 2, b.meanMs] as [number, number]),
  }));
}

function costRatio(bins: TimingBin[], over: string, under: string): number | null {
  const key = (b: TimingBin) => `${b.linksLo}:${b.linksHi}`;
  const base = new Map(bins.filter((b) => b.scheme === under).map((b) => [key(b), b]));
  let num = 0;
  let den = 0;
  for (const b of bins.filter((x) => x.scheme === over)) {
    const u = base.get(key(b));
    if (!u || u.meanMs <= 0) continue;
    const w = Math.min(b.samples, u.samples);
    num += w * (b.meanMs / u.meanMs);
    den += w;
  }
  return den > 0 ? num / den : null;
}

export function buildRuntimeSvg(spec: RuntimeSpec): string {
  const bins = readTimingBins(spec.csv);
  const series = runtimeSeries(bins);
  const xlo = Math.min(...bins.map((b) => b.linksLo));
  const xhi = Math.max(...bins.map((b) => b.linksHi));
  const yhi = Math.max(...bins.map((b) => b.meanMs)) * 1.12;
  const ratio = costRatio(bins, "one-tree", "edp");
  const cell: CellSpec = {
    title: "precompute cost",
    xLabel: "links",
    yLabel: "mean ms",
    xDomain: [xlo, Math.max(xhi, xlo + 1)],
    yDomain: [0, Math.max(yhi, 0.001)],
    series,
    row: "runtime",
    annotations: ratio === null ? [] : [`one-tree / edp ≈ ×${ratio.toFixed(2)}`],
  };
  const legend = series.map((s) => ({ label: s.label, color: s.color }));
  return renderPanelGrid([[cell]], legend);
}

export async function plotRuntime(spec: RuntimeSpec): Promise<string[]> {
  return writeImages(spec.output, buildRuntimeSvg(spec));
}

export { MERGED_COLOR, MERGED_LABEL };
