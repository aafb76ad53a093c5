#!/usr/bin/env node
/**
 * plot quench DIR --out FILE [--inset-log] [--no-overlay] [--audit]
 * plot spectrum DIR --out FILE [--audit]
 *
 * Renders SVG figures from a spinquench run directory. --audit verifies
 * the inputs against the manifest hashes (and, for quench figures, that
 * the plotted overlay equals the overlay CSV exactly) after rendering.
 */

import { writeFileSync } from "node:fs";
import { auditQuenchFigure, auditSpectrumFigure } from "./audit.js";
import { MissingFilesError } from "./data.js";
import { renderQuenchFigure } from "./quench.js";
import { renderSpectrumFigure } from "./spectrum.js";

interface Args {
  command: string;
  runDir: string;
  out?: string;
  insetLog: boolean;
  overlay: boolean;
  audit: boolean;
}

function parseArgs(argv: string[]): Args {
  const [command, ...rest] = argv;
  if (!command || !["quench", "spectrum"].includes(command)) {
    throw new Error("usage: plot <quench|spectrum> DIR --out FILE [options]");
  }
  const args: Args = { command, runDir: "", insetLog: false, overlay: true, audit: false };
  for (let i = 0; i < rest.length; i++) {
    const token = rest[i];
    if (token === "--out") args.out = rest[++i];
    else if (token === "--inset-log") args.insetLog = true;
    else if (token === "--no-overlay") args.overlay = false;
    else if (token === "--audit") args.audit = true;
    else if (token.startsWith("--")) throw new Error(`unknown flag ${token}`);
    else if (!args.runDir) args.runDir = token;
    else throw new Error(`unexpected argument ${token}`);
  }
  if (!args.runDir) throw new Error("run directory is required");
  if (!args.out) throw new Error("--out FILE is required");
  return args;
}

export function main(argv: string[]): number {
  let args: Args;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error(String(err instanceof Error ? err.message : err));
    return 2;
  }
  try {
    let svg: string;
    if (args.command === "quench") {
      svg = renderQuenchFigure(args.runDir, {
        overlay: args.overlay,
        insetLog: args.insetLog,
      });
    } else {
      svg = renderSpectrumFigure(args.runDir);
    }
    writeFileSync(args.out!, svg);
    if (args.audit) {
      const result =
        args.command === "quench"
          ? auditQuenchFigure(args.runDir, svg)
          : auditSpectrumFigure(args.runDir);
      if (!result.ok) {
        for (const f of result.hashFailures) console.error(`audit: hash mismatch: ${f}`);
        for (const f of result.overlayFailures) console.error(`audit: ${f}`);
        return 1;
      }
      console.error("audit: ok");
    }
    console.log(args.out);
    return 0;
  } catch (err) {
    if (err instanceof MissingFilesError) {
      console.error(err.message);
      return 1;
    }
    console.error(String(err instanceof Error ? err.message : err));
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined && import.meta.url.endsWith(process.argv[1].split("/").pop()!);
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
