/**
 * Checksum audit: plotting never recomputes physics, so a rendered
 * figure must be explainable entirely by its input files. Two checks:
 *   1. every input CSV still matches the sha256 recorded in the
 *      manifest when the run was produced;
 *   2. the overlay points embedded in the SVG equal the overlay CSV
 *      values verbatim (no reformatting, no resampling).
 */

import { join } from "node:path";
import { Manifest, auditHashes, readCsv, readManifest } from "./data.js";

export interface AuditResult {
  ok: boolean;
  hashFailures: string[];
  overlayFailures: string[];
}

function extractOverlay(svg: string): { x: string[]; y: string[] } | null {
  const match = svg.match(
    /<polyline data-role="loschmidt-overlay" data-x="([^"]*)" data-y="([^"]*)"/,
  );
  if (!match) return null;
  return { x: match[1].split(" "), y: match[2].split(" ") };
}

function overlaySource(runDir: string, manifest: Manifest): { x: string[]; y: string[] } | null {
  if (manifest.files["overlay_truncated_le.csv"]) {
    const table = readCsv(join(runDir, "overlay_truncated_le.csv"));
    const li = table.header.indexOf("bin_left");
    const di = table.header.indexOf("density");
    return {
      x: table.raw.map((cells) => cells[li]),
      y: table.raw.map((cells) => cells[di]),
    };
  }
  if (manifest.files["overlay_two_mode.csv"]) {
    const table = readCsv(join(runDir, "overlay_two_mode.csv"));
    const xi = table.header.indexOf("x");
    const di = table.header.indexOf("density_with_background");
    return {
      x: table.raw.map((cells) => cells[xi]),
      y: table.raw.map((cells) => cells[di]),
    };
  }
  return null;
}

export function auditQuenchFigure(runDir: string, svg: string): AuditResult {
  const manifest = readManifest(runDir);
  const hashFailures = auditHashes(runDir, manifest);

  const overlayFailures: string[] = [];
  const embedded = extractOverlay(svg);
  const source = overlaySource(runDir, manifest);
  if (source && !embedded) {
    overlayFailures.push("overlay CSV present but no overlay polyline in the figure");
  }
  if (embedded) {
    if (!source) {
      overlayFailures.push("figure has an overlay but the run directory has no overlay CSV");
    } else if (
      embedded.x.length !== source.x.length ||
      embedded.x.some((v, i) => v !== source.x[i]) ||
      embedded.y.some((v, i) => v !== source.y[i])
    ) {
      overlayFailures.push("embedded overlay points differ from the overlay CSV");
    }
  }
  return {
    ok: hashFailures.length === 0 && overlayFailures.length === 0,
    hashFailures,
    overlayFailures,
  };
}

export function auditSpectrumFigure(runDir: string): AuditResult {
  const manifest = readManifest(runDir);
  const hashFailures = auditHashes(runDir, manifest);
  return { ok: hashFailures.length === 0, hashFailures, overlayFailures: [] };
}
