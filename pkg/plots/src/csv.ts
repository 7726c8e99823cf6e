/** CSV readers for the experiment outputs.
 *
 * Two schemas are understood: per-(scheme, rate) aggregates and binned
 * precompute timings. Parsing is strict: a missing column, a short row, or
 * a cell that does not parse as a number raises a CsvError naming the
 * offender, so a broken file fails loudly instead of plotting nonsense.
 */

import { readFileSync } from "node:fs";
import Papa from "papaparse";

export class CsvError extends Error {}

export interface AggregateRow {
  scheme: string;
  rate: number;
  resilience: number;
  /** Mean hops over runs where the baseline delivered; null when none did. */
  avgHops: number | null;
  precomputeMs: number;
  runs: number;
}

export interface TimingBin {
  scheme: string;
  linksLo: number;
  linksHi: number;
  meanMs: number;
  samples: number;
}

const AGGREGATE_COLUMNS = [
  "scheme", "rate", "resilience", "avg_hops_edp_success",
  "mean_precompute_ms", "runs",
];
const TIMING_COLUMNS = ["scheme", "links_lo", "links_hi", "mean_ms", "samples"];

function parseTable(path: string, columns: string[]): Record<string, string>[] {
  let text: string;
  try {
    text = readFileSync(path, "utf8");
  } catch {
    throw new CsvError(`cannot read ${path}`);
  }
  const parsed = Papa.parse<Record<string, string>>(text.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  if (parsed.errors.length > 0) {
    const e = parsed.errors[0];
    const where = e.row === undefined ? "" : ` at row ${e.row + 2}`;
    throw new CsvError(`${path}: malformed CSV (${e.message}${where})`);
  }
  const have = new Set(parsed.meta.fields ?? []);
  for (const col of columns) {
    if (!have.has(col)) {
      throw new CsvError(`${path}: missing column '${col}'`);
    }
  }
  return parsed.data;
}

function num(path: string, rowIdx: number, col: string, cell: string | undefined): number {
  const v = Number(cell);
  if (cell === undefined || cell === "" || !Number.isFinite(v)) {
    throw new CsvError(
      `${path}: bad number '${cell ?? ""}' in column '${col}' (row ${rowIdx + 2})`);
  }
  return v;
}

export function readAggregateCsv(path: string): AggregateRow[] {
  return parseTable(path, AGGREGATE_COLUMNS).map((r, i) => ({
    scheme: r.scheme,
    rate: num(path, i, "rate", r.rate),
    resilience: num(path, i, "resilience", r.resilience),
    avgHops: r.avg_hops_edp_success === ""
      ? null
      : num(path, i, "avg_hops_edp_success", r.avg_hops_edp_success),
    precomputeMs: num(path, i, "mean_precompute_ms", r.mean_precompute_ms),
    runs: num(path, i, "runs", r.runs),
  }));
}

export function readTimingBins(path: string): TimingBin[] {
  return parseTable(path, TIMING_COLUMNS).map((r, i) => ({
    scheme: r.scheme,
    linksLo: num(path, i, "links_lo", r.links_lo),
    linksHi: num(path, i, "links_hi", r.links_hi),
    meanMs: num(path, i, "mean_ms", r.mean_ms),
    samples: num(path, i, "samples", r.samples),
  }));
}
