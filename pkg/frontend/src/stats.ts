import { CsvTable, SchemaError, requireColumns } from "./csv.js";

/** One renderable curve: a label, x values, and mean/variance at each x. */
export interface Curve {
  label: string;
  x: number[];
  mean: number[];
  variance: number[];
}

/**
 * Collapse trace rows into one curve per group (policy, or alpha for the
 * exponent sweep): across replications, the per-round mean and population
 * variance of the time-averaged regret.  No other statistics are computed
 * here; the science lives upstream.
 */
export function tracesToCurves(table: CsvTable, path: string): Curve[] {
  const hasAlpha = table.header.includes("alpha");
  const groupCol = hasAlpha ? "alpha" : "policy";
  const [groupIdx, roundIdx, valueIdx] = requireColumns(
    table,
    [groupCol, "round", "time_avg_regret"],
    path,
  );

  // group -> round -> running (count, sum, sumsq)
  const acc = new Map<string, Map<number, [number, number, number]>>();
  for (const row of table.rows) {
    const group = row[groupIdx];
    const round = Number(row[roundIdx]);
    const value = Number(row[valueIdx]);
    if (!Number.isFinite(round) || !Number.isFinite(value)) {
      throw new SchemaError(`${path}: non-numeric round/value in group ${group}`);
    }
    let rounds = acc.get(group);
    if (rounds === undefined) {
      rounds = new Map();
      acc.set(group, rounds);
    }
    const cell = rounds.get(round);
    if (cell === undefined) {
      rounds.set(round, [1, value, value * value]);
    } else {
      cell[0] += 1;
      cell[1] += value;
      cell[2] += value * value;
    }
  }

  const curves: Curve[] = [];
  for (const [label, rounds] of acc) {
    const xs = [...rounds.keys()].sort((a, b) => a - b);
    const mean: number[] = [];
    const variance: number[] = [];
    for (const x of xs) {
      const [n, sum, sumsq] = rounds.get(x)!;
      const m = sum / n;
      mean.push(m);
      variance.push(Math.max(sumsq / n - m * m, 0));
    }
    const label2 = hasAlpha ? `alpha=${label}` : label;
    curves.push({ label: label2, x: xs, mean, variance });
  }
  curves.sort((a, b) => a.label.localeCompare(b.label));
  return curves;
}

/** The prior-sharpness table: one curve of final regret vs delta. */
export function priorTableToCurve(table: CsvTable, path: string): Curve[] {
  const [deltaIdx, valueIdx] = requireColumns(
    table,
    ["delta", "final_time_avg_regret"],
    path,
  );
  const acc = new Map<number, [number, number, number]>();
  for (const row of table.rows) {
    const delta = Number(row[deltaIdx]);
    const value = Number(row[valueIdx]);
    const cell = acc.get(delta);
    if (cell === undefined) {
      acc.set(delta, [1, value, value * value]);
    } else {
      cell[0] += 1;
      cell[1] += value;
      cell[2] += value * value;
    }
  }
  const xs = [...acc.keys()].sort((a, b) => a - b);
  const mean = xs.map((x) => acc.get(x)![1] / acc.get(x)![0]);
  const variance = xs.map((x, i) => {
    const [n, , sumsq] = acc.get(x)!;
    return Math.max(sumsq / n - mean[i] * mean[i], 0);
  });
  return [{ label: "final regret vs delta", x: xs, mean, variance }];
}

/** Pick the curve extractor from the header shape. */
export function curvesFor(table: CsvTable, path: string): Curve[] {
  if (table.header.includes("round")) {
    return tracesToCurves(table, path);
  }
  if (table.header.includes("delta")) {
    return priorTableToCurve(table, path);
  }
  throw new SchemaError(
    `${path}: unrecognized schema (need a 'round' trace or a 'delta' table); ` +
      `found: ${table.header.join(", ")}`,
  );
}
