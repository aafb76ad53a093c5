/**
 * The 4-panel quench-statistics figure:
 *   a) weight spectrum p(E_n) as stems on a log axis,
 *   b) Loschmidt-echo histogram with the analytic overlay (and an
 *      optional log-linear inset for exponential-regime runs),
 *   c) trace-distance histogram,
 *   d) magnetization histogram.
 *
 * Everything plotted comes straight from the run directory's CSVs; the
 * overlay polyline carries its source values verbatim so the audit can
 * check the figure against the files bit for bit.
 */

import { join } from "node:path";
import {
  CsvTable,
  Manifest,
  MissingFilesError,
  column,
  readCsv,
  readManifest,
  requireFiles,
} from "./data.js";
import {
  PanelBox,
  Scale,
  dataPolyline,
  extent,
  frame,
  histogramBars,
  linearScale,
  logScale,
  stems,
  svgDocument,
} from "./svg.js";

export interface QuenchFigureOptions {
  overlay?: boolean;
  insetLog?: boolean;
}

const WIDTH = 860;
const HEIGHT = 620;
const PANELS: Record<string, PanelBox> = {
  a: { x: 60, y: 40, width: 330, height: 220 },
  b: { x: 490, y: 40, width: 330, height: 220 },
  c: { x: 60, y: 350, width: 330, height: 220 },
  d: { x: 490, y: 350, width: 330, height: 220 },
};
const WEIGHT_FLOOR = 1e-12;

type Extras = (xScale: Scale, yScale: Scale, box: PanelBox) => string;

interface Histogram {
  left: number[];
  right: number[];
  density: number[];
  table: CsvTable;
}

function readHistogram(runDir: string, name: string): Histogram {
  const table = readCsv(join(runDir, name));
  return {
    left: column(table, "bin_left"),
    right: column(table, "bin_right"),
    density: column(table, "density"),
    table,
  };
}

function weightPanel(runDir: string): string {
  const table = readCsv(join(runDir, "spectrum_weights.csv"));
  const energies = column(table, "energy");
  const weights = column(table, "weight");
  const kept = energies
    .map((e, i) => [e, weights[i]] as const)
    .filter(([, w]) => w > WEIGHT_FLOOR);
  const box = PANELS.a;
  const [eLo, eHi] = extent(kept.map(([e]) => e));
  const pad = 0.05 * (eHi - eLo || 1);
  const xScale = linearScale([eLo - pad, eHi + pad], [box.x, box.x + box.width]);
  const yScale = logScale([WEIGHT_FLOOR, 1.5], [box.y + box.height, box.y]);
  const body = [
    stems(kept.map(([e]) => e), kept.map(([, w]) => w), xScale, yScale, WEIGHT_FLOOR),
    frame(box, xScale, yScale, {
      title: "a) weight spectrum",
      xLabel: "E_n",
      yLabel: "p(E_n)",
      yLog: true,
    }),
  ];
  return `<g data-panel="a">\n${body.join("\n")}\n</g>`;
}

function histogramPanel(
  id: string,
  title: string,
  xLabel: string,
  hist: Histogram,
  extras?: Extras,
): string {
  const box = PANELS[id];
  const [xLo, xHi] = [hist.left[0], hist.right[hist.right.length - 1]];
  const pad = 0.04 * (xHi - xLo || 1);
  const xScale = linearScale([xLo - pad, xHi + pad], [box.x, box.x + box.width]);
  const dMax = Math.max(...hist.density, 1e-300);
  const yScale = linearScale([0, 1.08 * dMax], [box.y + box.height, box.y]);
  const body = [
    histogramBars(hist.left, hist.right, hist.density, xScale, yScale),
    extras ? extras(xScale, yScale, box) : "",
    frame(box, xScale, yScale, { title, xLabel, yLabel: "density" }),
  ].filter(Boolean);
  return `<g data-panel="${id}">\n${body.join("\n")}\n</g>`;
}

/** Overlay for panel b: truncated-echo histogram if the run produced
 * one, else the closed-form two-mode density. Values embedded verbatim. */
function loschmidtOverlay(runDir: string, manifest: Manifest): Extras | null {
  if (manifest.files["overlay_truncated_le.csv"]) {
    const table = readCsv(join(runDir, "overlay_truncated_le.csv"));
    const li = table.header.indexOf("bin_left");
    const ri = table.header.indexOf("bin_right");
    const di = table.header.indexOf("density");
    const rawX = table.raw.map((cells) => cells[li]);
    const rawY = table.raw.map((cells) => cells[di]);
    const mids = table.rows.map((row) => (row[li] + row[ri]) / 2);
    return (xScale, yScale, box) =>
      dataPolyline(rawX, rawY, xScale, yScale, {
        dataRole: "loschmidt-overlay",
        clipTop: box.y,
        plotX: mids,
      });
  }
  if (manifest.files["overlay_two_mode.csv"]) {
    const table = readCsv(join(runDir, "overlay_two_mode.csv"));
    const xi = table.header.indexOf("x");
    const di = table.header.indexOf("density_with_background");
    const rawX = table.raw.map((cells) => cells[xi]);
    const rawY = table.raw.map((cells) => cells[di]);
    return (xScale, yScale, box) =>
      dataPolyline(rawX, rawY, xScale, yScale, {
        dataRole: "loschmidt-overlay",
        clipTop: box.y,
      });
  }
  return null;
}

/** Log-linear inset: log density against x, for exponential-regime runs. */
function loschmidtInset(hist: Histogram, box: PanelBox): string {
  const occupied = hist.density
    .map((d, i) => [i, d] as const)
    .filter(([, d]) => d > 0);
  if (occupied.length < 2) return "";
  const inset: PanelBox = {
    x: box.x + box.width - 150,
    y: box.y + 24,
    width: 135,
    height: 90,
  };
  const xs = occupied.map(([i]) => (hist.left[i] + hist.right[i]) / 2);
  const ds = occupied.map(([, d]) => d);
  const xScale = linearScale(extent(xs), [inset.x, inset.x + inset.width]);
  const [dLo, dHi] = extent(ds);
  const yScale = logScale([dLo, dHi], [inset.y + inset.height, inset.y]);
  const pts = xs.map((x, i) => `${xScale(x).toFixed(2)},${yScale(ds[i]).toFixed(2)}`);
  return [
    `<g data-role="inset-log">`,
    `<rect x="${inset.x}" y="${inset.y}" width="${inset.width}" height="${inset.height}" fill="white" stroke="#666" stroke-width="0.8"/>`,
    `<polyline points="${pts.join(" ")}" fill="none" stroke="#2e5d8c" stroke-width="1"/>`,
    `<text x="${inset.x + 4}" y="${inset.y + 11}" font-size="8">log-linear</text>`,
    `</g>`,
  ].join("\n");
}

export function renderQuenchFigure(
  runDir: string,
  options: QuenchFigureOptions = {},
): string {
  const overlayOn = options.overlay ?? true;
  const manifest = readManifest(runDir);
  requireFiles(runDir, [
    "spectrum_weights.csv",
    "loschmidt.csv",
    "trace_distance.csv",
    "magnetization.csv",
  ]);

  const le = readHistogram(runDir, "loschmidt.csv");
  const ds = readHistogram(runDir, "trace_distance.csv");
  const ms = readHistogram(runDir, "magnetization.csv");

  const overlay = overlayOn ? loschmidtOverlay(runDir, manifest) : null;
  const panelBExtras: Extras = (xScale, yScale, box) => {
    const parts: string[] = [];
    if (overlay) parts.push(overlay(xScale, yScale, box));
    if (options.insetLog) parts.push(loschmidtInset(le, box));
    return parts.filter(Boolean).join("\n");
  };

  const panels = [
    weightPanel(runDir),
    histogramPanel("b", "b) Loschmidt echo", "L", le, panelBExtras),
    histogramPanel("c", "c) trace distance", "D_S", ds),
    histogramPanel("d", "d) magnetization", "m_S", ms),
  ];
  return svgDocument(WIDTH, HEIGHT, panels.join("\n"));
}

export { MissingFilesError };
