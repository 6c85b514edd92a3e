#!/usr/bin/env node
/**
 * Render Figure-2-style panels from stablebandits output.
 *
 * Usage:
 *   stablebandits-plots --csv out/traces.csv [--manifest out/manifest.json]
 *                       [--csv ... up to 4 panels] [--scale 0.25]
 *                       --out panel.svg
 *
 * Each --csv adds one panel (benchmark traces, exponent-sweep traces, or the
 * prior-sharpness table); --manifest entries pair with --csv entries in
 * order.  --scale overrides the variance scale factor for the shaded bands
 * (default: the manifest's hint, else 0.25).
 */

import { SchemaError } from "./csv.js";
import { PanelSpec, renderPanels } from "./render.js";
import { readFileSync } from "node:fs";

interface Flags {
  csv: string[];
  manifest: string[];
  out?: string;
  scale?: number;
}

export function parseFlags(argv: string[]): Flags {
  const flags: Flags = { csv: [], manifest: [] };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const next = () => {
      i += 1;
      if (i >= argv.length) throw new SchemaError(`flag ${arg} needs a value`);
      return argv[i];
    };
    switch (arg) {
      case "--csv":
        flags.csv.push(next());
        break;
      case "--manifest":
        flags.manifest.push(next());
        break;
      case "--out":
        flags.out = next();
        break;
      case "--scale": {
        const value = Number(next());
        if (!(value > 0)) throw new SchemaError(`--scale must be positive, got ${value}`);
        flags.scale = value;
        break;
      }
      default:
        throw new SchemaError(`unknown flag ${arg}`);
    }
  }
  if (flags.csv.length === 0) throw new SchemaError("at least one --csv is required");
  if (flags.out === undefined) throw new SchemaError("--out is required");
  return flags;
}

function manifestScale(path: string | undefined): number | undefined {
  if (path === undefined) return undefined;
  try {
    const parsed = JSON.parse(readFileSync(path, "utf8")) as {
      variance_scale_hint?: number;
    };
    return parsed.variance_scale_hint;
  } catch {
    return undefined;
  }
}

export function run(argv: string[]): number {
  try {
    const flags = parseFlags(argv);
    const specs: PanelSpec[] = flags.csv.map((csvPath, i) => {
      const manifestPath = flags.manifest[i];
      return {
        csvPath,
        manifestPath,
        varianceScale: flags.scale ?? manifestScale(manifestPath) ?? 0.25,
      };
    });
    const rendered = renderPanels(specs, flags.out!);
    for (const panel of rendered) {
      console.log(`panel "${panel.title}": ${panel.curveLabels.length} curves ` +
        `(${panel.curveLabels.join(", ")})`);
    }
    console.log(`wrote ${flags.out}`);
    return 0;
  } catch (err) {
    if (err instanceof SchemaError) {
      console.error(`error: ${err.message}`);
      return 1;
    }
    console.error(`error: ${String(err)}`);
    return 2;
  }
}

import { fileURLToPath } from "node:url";
import { argv } from "node:process";

if (process.argv[1] !== undefined &&
    fileURLToPath(import.meta.url) === process.argv[1]) {
  process.exit(run(argv.slice(2)));
}
