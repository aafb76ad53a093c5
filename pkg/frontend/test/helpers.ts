/** Synthetic run directories for hermetic renderer tests. */

import { createHash } from "node:crypto";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

export function sha256(text: string): string {
  return createHash("sha256").update(text).digest("hex");
}

export interface FakeRunOptions {
  truncatedOverlay?: boolean;
  twoModeOverlay?: boolean;
  singleBin?: boolean;
}

function histogramCsv(singleBin: boolean): string {
  if (singleBin) {
    return "bin_left,bin_right,density\n0.5,1.5,1\n";
  }
  const lines = ["bin_left,bin_right,density"];
  for (let i = 0; i < 20; i++) {
    const left = 0.5 + i * 0.025;
    const right = left + 0.025;
    const density = 1 + Math.sin(i / 3) ** 2;
    lines.push(`${left},${right},${density}`);
  }
  return lines.join("\n") + "\n";
}

export function makeQuenchRun(opts: FakeRunOptions = {}): string {
  const dir = mkdtempSync(join(tmpdir(), "plotfix-"));
  const files: Record<string, string> = {};

  const weights = ["energy,weight"];
  for (let i = 0; i < 30; i++) {
    weights.push(`${-8 + 0.3 * i},${Math.exp(-0.8 * i) * 0.86 + 1e-15}`);
  }
  files["spectrum_weights.csv"] = weights.join("\n") + "\n";
  files["loschmidt.csv"] = histogramCsv(opts.singleBin ?? false);
  files["trace_distance.csv"] = histogramCsv(opts.singleBin ?? false);
  files["magnetization.csv"] = histogramCsv(opts.singleBin ?? false);

  if (opts.twoModeOverlay) {
    const lines = ["x,density_arcsine,density_with_background"];
    for (let i = 1; i < 40; i++) {
      const x = 0.5 + i * 0.0125;
      lines.push(`${x},${1 / Math.sqrt(i)},${0.77 + 1 / Math.sqrt(i)}`);
    }
    files["overlay_two_mode.csv"] = lines.join("\n") + "\n";
  }
  if (opts.truncatedOverlay) {
    files["overlay_truncated_le.csv"] = histogramCsv(false);
  }

  const manifest = {
    command: "quench",
    files: Object.fromEntries(
      Object.entries(files).map(([name, text]) => [name, sha256(text)]),
    ),
  };
  for (const [name, text] of Object.entries(files)) {
    writeFileSync(join(dir, name), text);
  }
  writeFileSync(join(dir, "manifest.json"), JSON.stringify(manifest, null, 2));
  return dir;
}

export function makeSpectrumRun(j2Values: string[], nPoints = 9): string {
  const dir = mkdtempSync(join(tmpdir(), "plotfix-"));
  const files: Record<string, string> = {};
  for (const j2 of j2Values) {
    const lines = ["h,E0,E1,E2,E3,E4"];
    for (let i = 0; i < nPoints; i++) {
      const h = i * 0.5;
      const base = -3 - Number(j2) - 2 * h;
      lines.push([h, base, base + 0.3, base + 0.5, base + 0.8, base + 1.1].join(","));
    }
    files[`spectrum_j2_${j2}.csv`] = lines.join("\n") + "\n";
  }
  const manifest = {
    command: "spectrum",
    files: Object.fromEntries(
      Object.entries(files).map(([name, text]) => [name, sha256(text)]),
    ),
  };
  for (const [name, text] of Object.entries(files)) {
    writeFileSync(join(dir, name), text);
  }
  writeFileSync(join(dir, "manifest.json"), JSON.stringify(manifest, null, 2));
  return dir;
}
