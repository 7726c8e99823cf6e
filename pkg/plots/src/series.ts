/** Shape aggregate rows into per-panel series and apply the merge rule:
 * when the one-tree hop curve is identical to the baseline's, the two are
 * drawn as a single violet line instead of overlapping blue and red ones.
 */

import { AggregateRow } from "./csv.js";

export const SCHEME_ORDER = ["edp", "one-tree", "multiple-trees"];

export const SCHEME_COLORS: Record<string, string> = {
  "edp": "#2563eb",
  "one-tree": "#dc2626",
  "multiple-trees": "#16a34a",
};
export const MERGED_COLOR = "#7c3aed";
export const MERGED_LABEL = "edp = one-tree";
const EXTRA_COLORS = ["#f59e0b", "#0891b2", "#9f1239"];

export interface Series {
  label: string;
  color: string;
  points: [number, number][];
}

export interface Panel {
  title: string;
  rates: number[];
  resilience: Series[];
  hops: Series[];
  merged: boolean;
}

function schemeRank(s: string): number {
  const i = SCHEME_ORDER.indexOf(s);
  return i < 0 ? SCHEME_ORDER.length : i;
}

function color(scheme: string, fallback: number): string {
  return SCHEME_COLORS[scheme] ?? EXTRA_COLORS[fallback % EXTRA_COLORS.length];
}

export function hopsEqual(a: (number | null)[], b: (number | null)[]): boolean {
  if (a.length !== b.length) return false;
  return a.every((x, i) => {
    const y = b[i];
    if (x === null || y === null) return x === y;
    return Math.abs(x - y) < 1e-9;
  });
}

function points(rates: number[], values: (number | null)[]): [number, number][] {
  const out: [number, number][] = [];
  rates.forEach((r, i) => {
    const v = values[i];
    if (v !== null) out.push([r, v]);
  });
  return out;
}

export function buildPanel(title: string, rows: AggregateRow[]): Panel {
  const schemes = [...new Set(rows.map((r) => r.scheme))];
  schemes.sort((a, b) => schemeRank(a) - schemeRank(b) || a.localeCompare(b));
  const rates = [...new Set(rows.map((r) => r.rate))].sort((a, b) => a - b);

  const cell = new Map<string, AggregateRow>();
  for (const r of rows) cell.set(`${r.scheme}@${r.rate}`, r);
  const resilienceOf = (s: string) =>
    rates.map((r) => cell.get(`${s}@${r}`)?.resilience ?? null);
  const hopsOf = (s: string) =>
    rates.map((r) => cell.get(`${s}@${r}`)?.avgHops ?? null);

  const resilience = schemes.map((s, i) => ({
    label: s,
    color: color(s, i),
    points: points(rates, resilienceOf(s)),
  }));

  const merged = schemes.includes("edp") && schemes.includes("one-tree")
    && hopsEqual(hopsOf("edp"), hopsOf("one-tree"));
  const hops: Series[] = [];
  for (const [i, s] of schemes.entries()) {
    if (merged && s === "edp") {
      hops.push({ label: MERGED_LABEL, color: MERGED_COLOR, points: points(rates, hopsOf(s)) });
    } else if (merged && s === "one-tree") {
      continue;
    } else {
      hops.push({ label: s, color: color(s, i), points: points(rates, hopsOf(s)) });
    }
  }
  return { title, rates, resilience, hops, merged };
}
