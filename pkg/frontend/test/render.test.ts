import { execFileSync } from "node:child_process";
import { existsSync, mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { describe, expect, it } from "vitest";

import { renderPanels } from "../src/render.js";
import { run } from "../src/main.js";

const TRACE_HEADER = "replication,round,policy,chosen_arm,cumulative_regret,time_avg_regret";
const POLICIES = ["alpha_ts", "robust_alpha_ts", "gaussian_ts", "eps_greedy", "robust_ucb"];
const REPO_ROOT = resolve(__dirname, "..", "..");

function tempDir(): string {
  return mkdtempSync(join(tmpdir(), "sbplots-"));
}

function fixtureCsv(dir: string, replications = 2, rounds = 6): string {
  const lines = [TRACE_HEADER];
  for (const [p, policy] of POLICIES.entries()) {
    for (let rep = 0; rep < replications; rep++) {
      let cum = 0;
      for (let round = 1; round <= rounds; round++) {
        cum += 0.5 + p + 0.1 * rep;
        lines.push(`${rep},${round},${policy},0,${cum},${cum / round}`);
      }
    }
  }
  const path = join(dir, "traces.csv");
  writeFileSync(path, lines.join("\n") + "\n", "utf8");
  return path;
}

function curveLabels(svg: string): string[] {
  return [...svg.matchAll(/<polyline class="curve" data-label="([^"]+)"/g)].map(
    (m) => m[1],
  );
}

describe("renderPanels", () => {
  it("draws one curve per policy with legend labels", () => {
    const dir = tempDir();
    const csv = fixtureCsv(dir);
    const out = join(dir, "panel.svg");
    const rendered = renderPanels(
      [{ csvPath: csv, varianceScale: 0.25 }], out);
    expect(rendered[0].curveLabels).toEqual([...POLICIES].sort());
    const svg = readFileSync(out, "utf8");
    expect(curveLabels(svg)).toEqual([...POLICIES].sort());
    for (const policy of POLICIES) {
      expect(svg).toContain(`<text class="legend"`);
      expect(svg).toContain(`>${policy}</text>`);
    }
    // shaded band per curve (variance > 0 with two distinct replications)
    expect((svg.match(/<polygon class="band"/g) ?? []).length).toBe(5);
  });

  it("zero-width bands for a single replication", () => {
    const dir = tempDir();
    const csv = fixtureCsv(dir, 1);
    const out = join(dir, "panel.svg");
    renderPanels([{ csvPath: csv, varianceScale: 0.25 }], out);
    const svg = readFileSync(out, "utf8");
    expect(svg.match(/<polygon class="band"/g)).toBeNull();
    expect(curveLabels(svg)).toHaveLength(5);
  });

  it("is deterministic: same inputs, same bytes", () => {
    const dir = tempDir();
    const csv = fixtureCsv(dir);
    const outA = join(dir, "a.svg");
    const outB = join(dir, "b.svg");
    renderPanels([{ csvPath: csv, varianceScale: 0.25 }], outA);
    renderPanels([{ csvPath: csv, varianceScale: 0.25 }], outB);
    expect(readFileSync(outA, "utf8")).toEqual(readFileSync(outB, "utf8"));
  });

  it("lays out four panels in a 2x2 grid", () => {
    const dir = tempDir();
    const csv = fixtureCsv(dir);
    const out = join(dir, "grid.svg");
    renderPanels(
      [1, 2, 3, 4].map((i) => ({
        csvPath: csv,
        varianceScale: 0.25,
        title: `panel ${i}`,
      })),
      out,
    );
    const svg = readFileSync(out, "utf8");
    expect(svg).toContain('translate(560,400)');
    expect((svg.match(/<g transform=/g) ?? []).length).toBe(4);
  });
});

describe("cli", () => {
  it("reports schema mismatch with column diagnostics", () => {
    const dir = tempDir();
    const bad = join(dir, "bad.csv");
    writeFileSync(bad, "a,b\n1,2\n", "utf8");
    const rc = run(["--csv", bad, "--out", join(dir, "x.svg")]);
    expect(rc).toBe(1);
  });

  it("requires --csv and --out", () => {
    expect(run([])).toBe(1);
    const dir = tempDir();
    expect(run(["--csv", fixtureCsv(dir)])).toBe(1);
  });

  it("renders the desk-schema benchmark CSV produced by the python CLI", () => {
    // end-to-end through the real external interface: run the bandit CLI on
    // the bundled smoke config (all five policies), then plot its CSV
    const dir = tempDir();
    execFileSync(
      "python3",
      ["-m", "stablebandits.cli", "run",
       "--config", join(REPO_ROOT, "configs", "smoke.ini"),
       "--out", dir, "--reps", "2"],
      { cwd: REPO_ROOT, stdio: "pipe" },
    );
    const out = join(dir, "panel.svg");
    const rc = run([
      "--csv", join(dir, "traces.csv"),
      "--manifest", join(dir, "manifest.json"),
      "--out", out,
    ]);
    expect(rc).toBe(0);
    expect(existsSync(out)).toBe(true);
    const svg = readFileSync(out, "utf8");
    const labels = curveLabels(svg);
    expect(labels).toHaveLength(5);
    expect(labels).toEqual([...POLICIES].sort());
    // manifest hint drives the band scale; bands exist with 2 replications
    expect((svg.match(/<polygon class="band"/g) ?? []).length).toBeGreaterThan(0);
  });
});
