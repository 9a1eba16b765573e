/**
 * Batch SVG figure generation from aggregate tables: the 2x2 performance
 * layout (comparison, error, evaluations, improvement versus graph size, one
 * series per depth), the timing panels, and the tail-proportion curve.
 */

import Papa from "papaparse";
import { AggregateRow, NumericColumn, TAIL_COLUMNS } from "./schema.js";

export const FIGURE_KINDS = ["perf", "tail", "timing"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

export class EmptySelectionError extends Error {}

interface Series {
  label: string;
  points: { x: number; y: number; spread: number }[];
}

interface Panel {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

const PANEL_WIDTH = 460;
const PANEL_HEIGHT = 340;
const MARGIN = { left: 64, right: 16, top: 34, bottom: 44 };
const SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

function formatTick(value: number): string {
  if (value === 0) return "0";
  const magnitude = Math.abs(value);
  if (magnitude >= 1e4 || magnitude < 1e-3) return value.toExponential(1);
  return String(Number(value.toPrecision(4)));
}

function ticks(lo: number, hi: number, count = 5): number[] {
  const out: number[] = [];
  for (let i = 0; i <= count; i++) out.push(lo + ((hi - lo) * i) / count);
  return out;
}

function renderPanel(panel: Panel, originX: number, originY: number): string {
  const plotW = PANEL_WIDTH - MARGIN.left - MARGIN.right;
  const plotH = PANEL_HEIGHT - MARGIN.top - MARGIN.bottom;
  const xs = panel.series.flatMap((s) => s.points.map((p) => p.x));
  const ys = panel.series.flatMap((s) => s.points.flatMap((p) => [p.y - p.spread, p.y + p.spread]));
  let [xLo, xHi] = [Math.min(...xs), Math.max(...xs)];
  let [yLo, yHi] = [Math.min(...ys), Math.max(...ys)];
  if (xLo === xHi) [xLo, xHi] = [xLo - 1, xHi + 1];
  if (yLo === yHi) [yLo, yHi] = [yLo - 1, yHi + 1];
  const padY = 0.05 * (yHi - yLo);
  yLo -= padY;
  yHi += padY;
  const sx = (v: number) => originX + MARGIN.left + ((v - xLo) / (xHi - xLo)) * plotW;
  const sy = (v: number) => originY + MARGIN.top + plotH - ((v - yLo) / (yHi - yLo)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<rect x="${originX + MARGIN.left}" y="${originY + MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333"/>`,
  );
  parts.push(
    `<text x="${originX + PANEL_WIDTH / 2}" y="${originY + 18}" text-anchor="middle" font-size="14" font-weight="bold">${panel.title}</text>`,
  );
  parts.push(
    `<text x="${originX + PANEL_WIDTH / 2}" y="${originY + PANEL_HEIGHT - 8}" text-anchor="middle" font-size="12">${panel.xLabel}</text>`,
  );
  parts.push(
    `<text x="${originX + 14}" y="${originY + PANEL_HEIGHT / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 ${originX + 14} ${originY + PANEL_HEIGHT / 2})">${panel.yLabel}</text>`,
  );
  for (const t of ticks(xLo, xHi)) {
    parts.push(
      `<line x1="${sx(t)}" y1="${sy(yLo)}" x2="${sx(t)}" y2="${sy(yLo) + 4}" stroke="#333"/>`,
      `<text x="${sx(t)}" y="${sy(yLo) + 16}" text-anchor="middle" font-size="10">${formatTick(t)}</text>`,
    );
  }
  for (const t of ticks(yLo, yHi)) {
    parts.push(
      `<line x1="${sx(xLo) - 4}" y1="${sy(t)}" x2="${sx(xLo)}" y2="${sy(t)}" stroke="#333"/>`,
      `<text x="${sx(xLo) - 6}" y="${sy(t) + 3}" text-anchor="end" font-size="10">${formatTick(t)}</text>`,
    );
  }
  panel.series.forEach((series, index) => {
    const color = SERIES_COLORS[index % SERIES_COLORS.length];
    const sorted = [...series.points].sort((a, b) => a.x - b.x);
    const path = sorted.map((p) => `${sx(p.x)},${sy(p.y)}`).join(" ");
    parts.push(`<polyline points="${path}" fill="none" stroke="${color}" stroke-width="1.5"/>`);
    for (const p of sorted) {
      parts.push(`<circle cx="${sx(p.x)}" cy="${sy(p.y)}" r="2.5" fill="${color}"/>`);
      if (p.spread > 0) {
        parts.push(
          `<line x1="${sx(p.x)}" y1="${sy(p.y - p.spread)}" x2="${sx(p.x)}" y2="${sy(p.y + p.spread)}" stroke="${color}" stroke-width="1"/>`,
        );
      }
    }
    const legendY = originY + MARGIN.top + 14 + index * 14;
    const legendX = originX + MARGIN.left + plotW - 6;
    parts.push(
      `<text x="${legendX}" y="${legendY}" text-anchor="end" font-size="11" fill="${color}">${series.label}</text>`,
    );
  });
  return parts.join("\n");
}

function svgDocument(panels: Panel[], columns: number, deterministic: boolean): string {
  const rows = Math.ceil(panels.length / columns);
  const width = columns * PANEL_WIDTH;
  const height = rows * PANEL_HEIGHT;
  const body = panels
    .map((panel, i) =>
      renderPanel(panel, (i % columns) * PANEL_WIDTH, Math.floor(i / columns) * PANEL_HEIGHT),
    )
    .join("\n");
  const meta = deterministic ? "" : `<desc>generated ${new Date().toISOString()}</desc>\n`;
  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">\n` +
    meta +
    `<rect width="${width}" height="${height}" fill="white"/>\n` +
    body +
    "\n</svg>\n"
  );
}

function metricPanels(rows: AggregateRow[], specs: { title: string; column: NumericColumn }[]): Panel[] {
  if (rows.length === 0) {
    throw new EmptySelectionError("no aggregate rows to plot");
  }
  const seriesKeys = [...new Set(rows.map((r) => `${r.key.method} p=${r.key.p}`))].sort();
  return specs.map(({ title, column }) => ({
    title,
    xLabel: "graph size",
    yLabel: column,
    series: seriesKeys
      .map((label) => ({
        label,
        points: rows
          .filter((r) => `${r.key.method} p=${r.key.p}` === label)
          .map((r) => ({ x: r.key.graph_size, y: r.mean[column], spread: r.std[column] })),
      }))
      .filter((s) => s.points.length > 0),
  }));
}

export function renderPerf(rows: AggregateRow[], deterministic: boolean): string {
  return svgDocument(
    metricPanels(rows, [
      { title: "Expectation value comparison", column: "Classical Comparison" },
      { title: "Solution error", column: "Sample Error" },
      { title: "Function evaluations required", column: "Number of Evaluations" },
      { title: "Improvement", column: "Expectation Improvement" },
    ]),
    2,
    deterministic,
  );
}

export function renderTiming(rows: AggregateRow[], deterministic: boolean): string {
  return svgDocument(
    metricPanels(rows, [
      { title: "Cost operator generation", column: "time_build_cost_s" },
      { title: "Mixer generation", column: "time_build_mixer_s" },
      { title: "State evolution per evaluation", column: "time_evolve_mean_s" },
      { title: "Total trial time", column: "time_total_s" },
    ]),
    2,
    deterministic,
  );
}

export function renderTail(csvText: string, deterministic: boolean): string {
  const parsed = Papa.parse<Record<string, string>>(csvText.trim(), {
    header: true,
    skipEmptyLines: true,
  });
  const fields = parsed.meta.fields ?? [];
  for (const column of TAIL_COLUMNS) {
    if (!fields.includes(column)) {
      throw new Error(`tail table: missing column "${column}"`);
    }
  }
  if (parsed.data.length === 0) {
    throw new EmptySelectionError("tail table has no rows");
  }
  const panel: Panel = {
    title: "Infeasible-to-feasible proportion",
    xLabel: "graph size",
    yLabel: "(2^q - V!) / V!",
    series: [
      {
        label: "tail ratio",
        points: parsed.data.map((row) => ({
          x: Number(row.V),
          y: Number(row.ratio),
          spread: 0,
        })),
      },
    ],
  };
  return svgDocument([panel], 1, deterministic);
}
