/**
 * Spectral-flow figure: one subplot per coupling ratio, the lowest
 * levels drawn as lines against the local field (markers when the scan
 * has a single grid point).
 */

import { readdirSync } from "node:fs";
import { join } from "node:path";
import { MissingFilesError, readCsv, readManifest } from "./data.js";
import {
  PanelBox,
  extent,
  frame,
  linearScale,
  markers,
  svgDocument,
} from "./svg.js";

const WIDTH = 560;
const SUBPLOT_HEIGHT = 230;
const MARGIN = { left: 70, right: 30, top: 40, gap: 50, bottom: 50 };
const LINE_COLORS = ["#2e5d8c", "#c0392b", "#27824d", "#8e6d13", "#6a4a93"];

function fmtPts(pts: Array<[number, number]>): string {
  return pts.map(([x, y]) => `${x.toFixed(2)},${y.toFixed(2)}`).join(" ");
}

export function spectrumCsvNames(runDir: string): string[] {
  return readdirSync(runDir)
    .filter((name) => /^spectrum_j2_.*\.csv$/.test(name))
    .sort((a, b) => Number(a.slice(12, -4)) - Number(b.slice(12, -4)));
}

export function renderSpectrumFigure(runDir: string): string {
  readManifest(runDir); // presence check; scans always carry one
  const names = spectrumCsvNames(runDir);
  if (names.length === 0) {
    throw new MissingFilesError([join(runDir, "spectrum_j2_*.csv")]);
  }

  const height =
    MARGIN.top + names.length * SUBPLOT_HEIGHT + (names.length - 1) * MARGIN.gap + MARGIN.bottom;
  const parts: string[] = [];
  names.forEach((name, idx) => {
    const table = readCsv(join(runDir, name));
    const hs = table.rows.map((row) => row[0]);
    const nLevels = table.header.length - 1;
    const box: PanelBox = {
      x: MARGIN.left,
      y: MARGIN.top + idx * (SUBPLOT_HEIGHT + MARGIN.gap),
      width: WIDTH - MARGIN.left - MARGIN.right,
      height: SUBPLOT_HEIGHT,
    };
    const [hLo, hHi] = extent(hs);
    const hPad = 0.03 * (hHi - hLo || 1);
    const xScale = linearScale([hLo - hPad, hHi + hPad], [box.x, box.x + box.width]);
    const all = table.rows.flatMap((row) => row.slice(1));
    const [eLo, eHi] = extent(all);
    const ePad = 0.06 * (eHi - eLo || 1);
    const yScale = linearScale([eLo - ePad, eHi + ePad], [box.y + box.height, box.y]);

    const curves: string[] = [];
    for (let level = 0; level < nLevels; level++) {
      const color = LINE_COLORS[level % LINE_COLORS.length];
      const ys = table.rows.map((row) => row[level + 1]);
      if (hs.length === 1) {
        curves.push(markers(hs, ys, xScale, yScale, color));
      } else {
        const pts = hs.map((h, i) => [xScale(h), yScale(ys[i])] as [number, number]);
        curves.push(
          `<polyline data-level="${level}" points="${fmtPts(pts)}" fill="none" stroke="${color}" stroke-width="1.3"/>`,
        );
      }
    }
    const j2 = name.slice(12, -4);
    parts.push(
      `<g data-panel="j2-${j2}">\n` +
        curves.join("\n") +
        "\n" +
        frame(box, xScale, yScale, {
          title: `J2/J1 = ${j2}`,
          xLabel: idx === names.length - 1 ? "h_S" : undefined,
          yLabel: "E",
        }) +
        "\n</g>",
    );
  });
  return svgDocument(WIDTH, height, parts.join("\n"));
}
