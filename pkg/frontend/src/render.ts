import { readFileSync, writeFileSync } from "node:fs";

import { parseCsv, SchemaError } from "./csv.js";
import { curvesFor, Curve } from "./stats.js";
import { documentSvg, panelSvg, PANEL_HEIGHT, PANEL_WIDTH } from "./svg.js";

export interface PanelSpec {
  csvPath: string;
  manifestPath?: string;
  varianceScale: number;
  title?: string;
}

export interface RenderedPanel {
  curveLabels: string[];
  title: string;
}

interface Manifest {
  subcommand?: string;
  variance_scale_hint?: number;
  config?: { alpha?: number };
}

function readManifest(path: string | undefined): Manifest {
  if (path === undefined) return {};
  try {
    return JSON.parse(readFileSync(path, "utf8")) as Manifest;
  } catch (err) {
    throw new SchemaError(`${path}: cannot read manifest (${String(err)})`);
  }
}

function panelTitle(spec: PanelSpec, manifest: Manifest): string {
  if (spec.title !== undefined) return spec.title;
  const sub = manifest.subcommand ?? "run";
  const alpha = manifest.config?.alpha;
  return alpha !== undefined ? `${sub}, alpha=${alpha}` : sub;
}

/** Render one or more panels (2x2 grid for four inputs) into an SVG file. */
export function renderPanels(specs: PanelSpec[], outPath: string): RenderedPanel[] {
  if (specs.length === 0 || specs.length > 4) {
    throw new SchemaError(`need between 1 and 4 panels, got ${specs.length}`);
  }
  const cols = specs.length >= 3 ? 2 : specs.length;
  const fragments: string[] = [];
  const rendered: RenderedPanel[] = [];
  specs.forEach((spec, i) => {
    const manifest = readManifest(spec.manifestPath);
    const table = parseCsv(spec.csvPath);
    const curves: Curve[] = curvesFor(table, spec.csvPath);
    const title = panelTitle(spec, manifest);
    const isDeltaPanel = !table.header.includes("round");
    const offsetX = (i % cols) * PANEL_WIDTH;
    const offsetY = Math.floor(i / cols) * PANEL_HEIGHT;
    fragments.push(
      panelSvg(
        curves,
        {
          title,
          varianceScale: spec.varianceScale,
          xLabel: isDeltaPanel ? "prior half-width" : "round",
          yLabel: isDeltaPanel ? "final time-averaged regret" : "time-averaged regret",
        },
        offsetX,
        offsetY,
      ),
    );
    rendered.push({ curveLabels: curves.map((c) => c.label), title });
  });
  writeFileSync(outPath, documentSvg(fragments, cols), "utf8");
  return rendered;
}
