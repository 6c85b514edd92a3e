import { Curve } from "./stats.js";

// Okabe-Ito palette: distinguishable in print and for color-blind readers.
const PALETTE = [
  "#0072B2",
  "#D55E00",
  "#009E73",
  "#CC79A7",
  "#E69F00",
  "#56B4E9",
  "#000000",
  "#F0E442",
];

const WIDTH = 560;
const HEIGHT = 400;
const MARGIN = { top: 36, right: 16, bottom: 44, left: 64 };

function fmt(value: number): string {
  // fixed short formatting keeps output bytes deterministic
  if (!Number.isFinite(value)) return "0";
  return Number(value.toFixed(3)).toString();
}

function niceTicks(lo: number, hi: number, count: number): number[] {
  if (!(hi > lo)) return [lo];
  const span = hi - lo;
  const step = Math.pow(10, Math.floor(Math.log10(span / count)));
  const err = span / count / step;
  const mult = err >= 7.5 ? 10 : err >= 3.5 ? 5 : err >= 1.5 ? 2 : 1;
  const s = step * mult;
  const ticks: number[] = [];
  for (let v = Math.ceil(lo / s) * s; v <= hi + 1e-12 * span; v += s) {
    ticks.push(v);
  }
  return ticks;
}

export interface PanelOptions {
  title: string;
  varianceScale: number;
  xLabel: string;
  yLabel: string;
}

/** Build one panel's SVG fragment: axes, scaled-variance bands, mean lines,
 * and a legend entry per curve. */
export function panelSvg(curves: Curve[], opts: PanelOptions, offsetX = 0, offsetY = 0): string {
  const innerW = WIDTH - MARGIN.left - MARGIN.right;
  const innerH = HEIGHT - MARGIN.top - MARGIN.bottom;

  let xMin = Infinity;
  let xMax = -Infinity;
  let yMin = Infinity;
  let yMax = -Infinity;
  for (const c of curves) {
    for (let i = 0; i < c.x.length; i++) {
      const band = opts.varianceScale * c.variance[i];
      xMin = Math.min(xMin, c.x[i]);
      xMax = Math.max(xMax, c.x[i]);
      yMin = Math.min(yMin, c.mean[i] - band);
      yMax = Math.max(yMax, c.mean[i] + band);
    }
  }
  if (!(xMax > xMin)) xMax = xMin + 1;
  if (!(yMax > yMin)) yMax = yMin + 1;
  const padY = 0.05 * (yMax - yMin);
  yMin -= padY;
  yMax += padY;

  const px = (x: number) => MARGIN.left + ((x - xMin) / (xMax - xMin)) * innerW;
  const py = (y: number) => MARGIN.top + innerH - ((y - yMin) / (yMax - yMin)) * innerH;

  const parts: string[] = [];
  parts.push(`<g transform="translate(${offsetX},${offsetY})">`);
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${innerW}" height="${innerH}" ` +
      `fill="white" stroke="#444" stroke-width="1"/>`,
  );
  parts.push(
    `<text class="title" x="${MARGIN.left + innerW / 2}" y="${MARGIN.top - 12}" ` +
      `text-anchor="middle" font-size="14" font-weight="bold">${opts.title}</text>`,
  );

  for (const t of niceTicks(xMin, xMax, 6)) {
    const x = px(t);
    parts.push(`<line x1="${fmt(x)}" y1="${MARGIN.top + innerH}" x2="${fmt(x)}" ` +
      `y2="${MARGIN.top + innerH + 4}" stroke="#444"/>`);
    parts.push(`<text x="${fmt(x)}" y="${MARGIN.top + innerH + 18}" text-anchor="middle" ` +
      `font-size="11">${fmt(t)}</text>`);
  }
  for (const t of niceTicks(yMin, yMax, 5)) {
    const y = py(t);
    parts.push(`<line x1="${MARGIN.left - 4}" y1="${fmt(y)}" x2="${MARGIN.left}" ` +
      `y2="${fmt(y)}" stroke="#444"/>`);
    parts.push(`<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end" ` +
      `font-size="11">${fmt(t)}</text>`);
  }
  parts.push(
    `<text x="${MARGIN.left + innerW / 2}" y="${HEIGHT - 8}" text-anchor="middle" ` +
      `font-size="12">${opts.xLabel}</text>`,
  );
  parts.push(
    `<text transform="translate(16,${MARGIN.top + innerH / 2}) rotate(-90)" ` +
      `text-anchor="middle" font-size="12">${opts.yLabel}</text>`,
  );

  curves.forEach((curve, ci) => {
    const color = PALETTE[ci % PALETTE.length];
    if (curve.variance.some((v) => v > 0)) {
      const upper = curve.x.map((x, i) =>
        `${fmt(px(x))},${fmt(py(curve.mean[i] + opts.varianceScale * curve.variance[i]))}`);
      const lower = [...curve.x.keys()].reverse().map((i) =>
        `${fmt(px(curve.x[i]))},${fmt(py(curve.mean[i] - opts.varianceScale * curve.variance[i]))}`);
      parts.push(
        `<polygon class="band" data-label="${curve.label}" ` +
          `points="${upper.join(" ")} ${lower.join(" ")}" ` +
          `fill="${color}" opacity="0.15" stroke="none"/>`,
      );
    }
    const points = curve.x.map((x, i) => `${fmt(px(x))},${fmt(py(curve.mean[i]))}`);
    parts.push(
      `<polyline class="curve" data-label="${curve.label}" points="${points.join(" ")}" ` +
        `fill="none" stroke="${color}" stroke-width="1.6"/>`,
    );
    const ly = MARGIN.top + 14 + 16 * ci;
    const lx = MARGIN.left + innerW - 150;
    parts.push(`<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" ` +
      `stroke="${color}" stroke-width="2"/>`);
    parts.push(
      `<text class="legend" x="${lx + 28}" y="${ly}" font-size="11">${curve.label}</text>`,
    );
  });
  parts.push("</g>");
  return parts.join("\n");
}

/** Assemble 1..4 panels into a document: single panel, or a 2x2 grid. */
export function documentSvg(panels: string[], cols: number): string {
  const rows = Math.ceil(panels.length / cols);
  const width = WIDTH * Math.min(panels.length, cols);
  const height = HEIGHT * rows;
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
    ...panels,
    "</svg>",
    "",
  ].join("\n");
}

export const PANEL_WIDTH = WIDTH;
export const PANEL_HEIGHT = HEIGHT;
