/**
 * Reading spinquench run directories: 17-significant-digit CSVs plus a
 * manifest that carries a sha256 for every emitted file.
 *
 * Raw cell strings are kept alongside the parsed numbers so downstream
 * consumers (the overlay audit in particular) can compare values exactly
 * as written, with no reformatting loss.
 */

import { createHash } from "node:crypto";
import { existsSync, readFileSync } from "node:fs";
import { join } from "node:path";

export interface CsvTable {
  header: string[];
  /** parsed numeric rows */
  rows: number[][];
  /** verbatim cell strings, same shape as rows */
  raw: string[][];
}

export function parseCsv(text: string): CsvTable {
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  const header = lines[0].split(",").map((s) => s.trim());
  const raw = lines.slice(1).map((line) => line.split(",").map((s) => s.trim()));
  const rows = raw.map((cells) => cells.map(Number));
  return { header, rows, raw };
}

export function readCsv(path: string): CsvTable {
  return parseCsv(readFileSync(path, "utf8"));
}

export function column(table: CsvTable, name: string): number[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`column ${name} not found (have: ${table.header.join(", ")})`);
  }
  return table.rows.map((row) => row[idx]);
}

export interface Manifest {
  command: string;
  files: Record<string, string>;
  engine?: Record<string, unknown>;
  derived?: Record<string, unknown>;
  overlays?: Record<string, unknown>;
  params?: Record<string, unknown>;
}

export function readManifest(runDir: string): Manifest {
  const path = join(runDir, "manifest.json");
  if (!existsSync(path)) {
    throw new MissingFilesError([path]);
  }
  return JSON.parse(readFileSync(path, "utf8")) as Manifest;
}

export class MissingFilesError extends Error {
  readonly missing: string[];

  constructor(missing: string[]) {
    super(`missing input files:\n  ${missing.join("\n  ")}`);
    this.missing = missing;
  }
}

/** Every path must exist; reports the complete list of absences at once. */
export function requireFiles(runDir: string, names: string[]): void {
  const missing = names
    .map((name) => join(runDir, name))
    .filter((path) => !existsSync(path));
  if (missing.length > 0) {
    throw new MissingFilesError(missing);
  }
}

export function sha256File(path: string): string {
  return createHash("sha256").update(readFileSync(path)).digest("hex");
}

/**
 * Verify that on-disk inputs still match the hashes recorded when the run
 * was produced. Returns the names that fail; empty means clean.
 */
export function auditHashes(runDir: string, manifest: Manifest, names?: string[]): string[] {
  const bad: string[] = [];
  for (const [name, digest] of Object.entries(manifest.files)) {
    if (names && !names.includes(name)) continue;
    const path = join(runDir, name);
    if (!existsSync(path) || sha256File(path) !== digest) {
      bad.push(name);
    }
  }
  return bad;
}
