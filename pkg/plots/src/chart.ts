/** Minimal deterministic SVG chart builder: linear scales, nice ticks,
 * polylines with point markers, a shared legend, and a rows-by-columns
 * panel grid. Plain string assembly, so identical inputs give identical
 * bytes; the raster output is produced from the same string.
 */

import { Series } from "./series.js";

export interface CellSpec {
  title?: string;
  xLabel?: string;
  yLabel?: string;
  xDomain: [number, number];
  yDomain: [number, number];
  series: Series[];
  /** Tag written to data-row attributes, e.g. "resilience" or "hops". */
  row: string;
  /** Short notes drawn inside the cell's top-right corner. */
  annotations?: string[];
}

export interface LegendItem {
  label: string;
  color: string;
}

const CELL_W = 250;
const CELL_H = 170;
const PAD_L = 52;
const PAD_R = 12;
const PAD_T = 26;
const PAD_B = 40;
const LEGEND_H = 26;
const FONT = "DejaVu Sans, Helvetica, Arial, sans-serif";

function esc(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function fmt(v: number): string {
  return v.toFixed(2).replace(/\.?0+$/, "") || "0";
}

export function niceTicks(lo: number, hi: number, want = 5): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const raw = span / Math.max(1, want);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  let step = mag;
  for (const m of [1, 2, 5, 10]) {
    if (raw <= m * mag) {
      step = m * mag;
      break;
    }
  }
  const ticks: number[] = [];
  for (let t = Math.ceil(lo / step) * step; t <= hi + step * 1e-9; t += step) {
    ticks.push(Math.abs(t) < step * 1e-9 ? 0 : t);
  }
  return ticks;
}

function tickLabel(v: number): string {
  return String(parseFloat(v.toPrecision(4)));
}

function drawCell(ox: number, oy: number, cell: CellSpec): string {
  const iw = CELL_W - PAD_L - PAD_R;
  const ih = CELL_H - PAD_T - PAD_B;
  const x0 = ox + PAD_L;
  const y0 = oy + PAD_T;
  const [xlo, xhi] = cell.xDomain;
  const [ylo, yhi] = cell.yDomain;
  const sx = (v: number) => x0 + (xhi > xlo ? ((v - xlo) / (xhi - xlo)) * iw : iw / 2);
  const sy = (v: number) => y0 + ih - (yhi > ylo ? ((v - ylo) / (yhi - ylo)) * ih : ih / 2);

  const parts: string[] = [];
  parts.push(`<rect x="${x0}" y="${y0}" width="${iw}" height="${ih}" fill="none" stroke="#9ca3af" stroke-width="1"/>`);
  for (const t of niceTicks(ylo, yhi)) {
    const y = fmt(sy(t));
    parts.push(`<line x1="${x0}" y1="${y}" x2="${x0 + iw}" y2="${y}" stroke="#e5e7eb" stroke-width="0.6"/>`);
    parts.push(`<text x="${x0 - 5}" y="${y}" font-size="9.5" text-anchor="end" dominant-baseline="middle" fill="#374151">${tickLabel(t)}</text>`);
  }
  for (const t of niceTicks(xlo, xhi)) {
    const x = fmt(sx(t));
    parts.push(`<line x1="${x}" y1="${fmt(y0 + ih)}" x2="${x}" y2="${fmt(y0 + ih + 4)}" stroke="#6b7280" stroke-width="1"/>`);
    parts.push(`<text x="${x}" y="${fmt(y0 + ih + 14)}" font-size="9.5" text-anchor="middle" fill="#374151">${tickLabel(t)}</text>`);
  }
  if (cell.title) {
    parts.push(`<text x="${ox + CELL_W / 2}" y="${oy + PAD_T - 9}" font-size="11" font-weight="bold" text-anchor="middle" fill="#111827">${esc(cell.title)}</text>`);
  }
  if (cell.xLabel) {
    parts.push(`<text x="${x0 + iw / 2}" y="${oy + CELL_H - 10}" font-size="10.5" text-anchor="middle" fill="#111827">${esc(cell.xLabel)}</text>`);
  }
  if (cell.yLabel) {
    const cx = ox + 13;
    const cy = y0 + ih / 2;
    parts.push(`<text x="${cx}" y="${cy}" font-size="10.5" text-anchor="middle" fill="#111827" transform="rotate(-90 ${cx} ${cy})">${esc(cell.yLabel)}</text>`);
  }
  for (const s of cell.series) {
    if (s.points.length === 0) continue;
    const coords = s.points.map(([x, y]) => `${fmt(sx(x))},${fmt(sy(y))}`);
    if (coords.length > 1) {
      parts.push(`<polyline class="series" data-row="${cell.row}" data-label="${esc(s.label)}" points="${coords.join(" ")}" fill="none" stroke="${s.color}" stroke-width="1.8"/>`);
    }
    for (const c of coords) {
      const [x, y] = c.split(",");
      parts.push(`<circle class="pt" data-row="${cell.row}" data-label="${esc(s.label)}" cx="${x}" cy="${y}" r="2.2" fill="${s.color}"/>`);
    }
  }
  (cell.annotations ?? []).forEach((note, i) => {
    parts.push(`<text x="${x0 + iw - 5}" y="${y0 + 13 + 12 * i}" font-size="9.5" text-anchor="end" fill="#4b5563">${esc(note)}</text>`);
  });
  return parts.join("\n");
}

export function renderPanelGrid(cells: CellSpec[][], legend: LegendItem[]): string {
  const rows = cells.length;
  const cols = Math.max(...cells.map((r) => r.length));
  const width = cols * CELL_W + 16;
  const height = rows * CELL_H + LEGEND_H + 12;
  const parts: string[] = [];
  parts.push(`<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" font-family="${FONT}">`);
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  let lx = 14;
  for (const item of legend) {
    parts.push(`<line x1="${lx}" y1="${LEGEND_H / 2 + 4}" x2="${lx + 20}" y2="${LEGEND_H / 2 + 4}" stroke="${item.color}" stroke-width="2.4"/>`);
    parts.push(`<text x="${lx + 25}" y="${LEGEND_H / 2 + 8}" font-size="11" fill="#111827">${esc(item.label)}</text>`);
    lx += 35 + item.label.length * 6.4;
  }
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cells[r].length; c++) {
      parts.push(drawCell(8 + c * CELL_W, LEGEND_H + 6 + r * CELL_H, cells[r][c]));
    }
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
