"""Command-line front end.

Subcommands:
  run           one benchmark batch -> traces.csv + manifest.json
  ablate-alpha  the tail-exponent sweep -> ablate_alpha.csv + manifest.json
  ablate-prior  the prior-sharpness sweep -> ablate_prior.csv + manifest.json
  validate      sampler/inference diagnostics -> validation.json

Exit codes: 0 success, 1 config error, 2 runtime error, 3 validation failure.
Floats in CSV output are written as shortest round-trip decimals, so parsing
the file reproduces the in-memory traces exactly.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
import time

from . import __version__
from .configio import ConfigError, config_as_dict, load_config
from .policies import PolicyKind
from .simulate import BatchResult, ExperimentConfig, run_batch
from .validate import run_validation

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_VALIDATION = 3

TRACE_HEADER = "replication,round,policy,chosen_arm,cumulative_regret,time_avg_regret"


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_trace_csv(path: str, batch: BatchResult, prefix_cols=()) -> None:
    """Rows: one per (replication, round, policy), optionally prefixed with
    sweep columns like ("alpha", value)."""
    prefix_names = ",".join(name for name, _ in prefix_cols)
    prefix_values = ",".join(_fmt(v) if isinstance(v, float) else str(v)
                             for _, v in prefix_cols)
    lines = []
    header = TRACE_HEADER if not prefix_cols else f"{prefix_names},{TRACE_HEADER}"
    mode = "a" if prefix_cols and os.path.exists(path) else "w"
    if mode == "w":
        lines.append(header)
    for label in batch.policy_labels:
        for rep, trace in enumerate(batch.traces[label]):
            cum = trace.cumulative_regret
            ta = trace.time_avg
            arms = trace.choices
            for idx in range(len(arms)):
                row = (f"{rep},{idx + 1},{label},{arms[idx]},"
                       f"{_fmt(cum[idx])},{_fmt(ta[idx])}")
                lines.append(f"{prefix_values},{row}" if prefix_cols else row)
    with open(path, mode, encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _write_manifest(path: str, *, subcommand: str, cfg: ExperimentConfig,
                    batch_summaries: dict, csv_name: str, threads: int,
                    wall_clock: float, extra=None, fingerprints=()) -> None:
    manifest = {
        "schema_version": 1,
        "build": f"stablebandits {__version__}",
        "subcommand": subcommand,
        "config": config_as_dict(cfg),
        "replication_stream_fingerprints": list(fingerprints),
        "threads": threads,
        "wall_clock_seconds": wall_clock,
        "csv": csv_name,
        "variance_scale_hint": 0.25 if subcommand == "run" else 0.5,
        "policies": batch_summaries,
    }
    if extra:
        manifest.update(extra)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _print_summary(batch: BatchResult) -> None:
    for label in batch.policy_labels:
        s = batch.final_summary[label]
        print(f"  {label}: final time-avg regret "
              f"{s['final_time_avg_mean']:.6g} (var {s['final_time_avg_var']:.6g})")


def cmd_run(args) -> int:
    loaded = load_config(args.config, seed_override=args.seed, reps_override=args.reps)
    cfg = loaded.experiment
    os.makedirs(args.out, exist_ok=True)
    started = time.time()
    batch = run_batch(cfg, threads=args.threads)
    wall = time.time() - started
    csv_path = os.path.join(args.out, "traces.csv")
    _write_trace_csv(csv_path, batch)
    _write_manifest(
        os.path.join(args.out, "manifest.json"), subcommand="run", cfg=cfg,
        batch_summaries={lab: {**batch.final_summary[lab],
                               "diagnostics": batch.diagnostics[lab]}
                         for lab in batch.policy_labels},
        csv_name="traces.csv", threads=args.threads, wall_clock=wall,
        fingerprints=batch.replication_fingerprints,
    )
    print(f"run: {cfg.replications} replications x {cfg.horizon} rounds, "
          f"{len(cfg.policies)} policies -> {csv_path}")
    _print_summary(batch)
    return EXIT_OK


def _single_policy_config(cfg: ExperimentConfig, kind: PolicyKind) -> ExperimentConfig:
    chosen = [p for p in cfg.policies if p.kind == kind]
    if not chosen:
        raise ConfigError(f"config must include a [policy ...] with kind = {kind.value}")
    return dataclasses.replace(cfg, policies=(chosen[0],))


def cmd_ablate_alpha(args) -> int:
    loaded = load_config(args.config, seed_override=args.seed, reps_override=args.reps)
    if not loaded.ablation_alphas:
        raise ConfigError("ablate-alpha needs 'alphas = ...' in an [ablation] section")
    base = _single_policy_config(loaded.experiment, PolicyKind.ALPHA_TS)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "ablate_alpha.csv")
    if os.path.exists(csv_path):
        os.remove(csv_path)
    started = time.time()
    summaries = {}
    fingerprints = ()
    for alpha in loaded.ablation_alphas:
        cfg = dataclasses.replace(
            base, alpha=alpha,
            policies=tuple(dataclasses.replace(p, alpha=alpha) for p in base.policies),
        )
        batch = run_batch(cfg, threads=args.threads)
        _write_trace_csv(csv_path, batch, prefix_cols=(("alpha", float(alpha)),))
        label = batch.policy_labels[0]
        summaries[f"alpha={alpha:g}"] = batch.final_summary[label]
        fingerprints = batch.replication_fingerprints
        print(f"ablate-alpha: alpha={alpha:g} final time-avg regret "
              f"{batch.final_summary[label]['final_time_avg_mean']:.6g}")
    wall = time.time() - started
    _write_manifest(
        os.path.join(args.out, "manifest.json"), subcommand="ablate-alpha",
        cfg=base, batch_summaries=summaries, csv_name="ablate_alpha.csv",
        threads=args.threads, wall_clock=wall,
        extra={"ablation_alphas": list(loaded.ablation_alphas)},
        fingerprints=fingerprints,
    )
    return EXIT_OK


def cmd_ablate_prior(args) -> int:
    loaded = load_config(args.config, seed_override=args.seed, reps_override=args.reps)
    if not loaded.ablation_deltas:
        raise ConfigError("ablate-prior needs 'deltas = ...' in an [ablation] section")
    base = _single_policy_config(loaded.experiment, PolicyKind.ALPHA_TS)
    os.makedirs(args.out, exist_ok=True)
    csv_path = os.path.join(args.out, "ablate_prior.csv")
    started = time.time()
    lines = ["delta,replication,final_cumulative_regret,final_time_avg_regret"]
    summaries = {}
    fingerprints = ()
    for delta in loaded.ablation_deltas:
        cfg = dataclasses.replace(base, prior_mode="sharpened", prior_delta=delta)
        batch = run_batch(cfg, threads=args.threads)
        label = batch.policy_labels[0]
        for rep, trace in enumerate(batch.traces[label]):
            lines.append(f"{_fmt(delta)},{rep},{_fmt(trace.cumulative_regret[-1])},"
                         f"{_fmt(trace.final_time_avg)}")
        summaries[f"delta={delta:g}"] = batch.final_summary[label]
        fingerprints = batch.replication_fingerprints
        print(f"ablate-prior: delta={delta:g} final time-avg regret "
              f"{batch.final_summary[label]['final_time_avg_mean']:.6g}")
    with open(csv_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    wall = time.time() - started
    _write_manifest(
        os.path.join(args.out, "manifest.json"), subcommand="ablate-prior",
        cfg=base, batch_summaries=summaries, csv_name="ablate_prior.csv",
        threads=args.threads, wall_clock=wall,
        extra={"ablation_deltas": list(loaded.ablation_deltas)},
        fingerprints=fingerprints,
    )
    return EXIT_OK


def cmd_validate(args) -> int:
    results = run_validation(alphas=tuple(args.alpha), n=args.n, seed=args.seed or 0)
    os.makedirs(args.out, exist_ok=True)
    all_passed = True
    for res in results:
        tag = "PASS" if res.passed else "FAIL"
        print(f"{tag} {res.name}: statistic={res.statistic:.6g} "
              f"threshold={res.threshold:.6g} ({res.detail})")
        all_passed = bool(all_passed and res.passed)
    report = {
        "schema_version": 1,
        "build": f"stablebandits {__version__}",
        "subcommand": "validate",
        "n": args.n,
        "seed": args.seed or 0,
        "alphas": list(args.alpha),
        "checks": [r.as_dict() for r in results],
        "all_passed": all_passed,
    }
    with open(os.path.join(args.out, "validation.json"), "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print("validation:", "all checks passed" if all_passed else "FAILURES present")
    return EXIT_OK if all_passed else EXIT_VALIDATION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stablebandits",
        description="Bandit experiments with symmetric alpha-stable rewards",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", required=True, help="INI experiment config")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=None, help="override master seed")
        p.add_argument("--reps", type=int, default=None, help="override replications")
        p.add_argument("--threads", type=int, default=1,
                       help="parallel replication workers")

    p_run = sub.add_parser("run", help="run one benchmark batch")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_aa = sub.add_parser("ablate-alpha", help="sweep the tail exponent")
    common(p_aa)
    p_aa.set_defaults(func=cmd_ablate_alpha)

    p_ap = sub.add_parser("ablate-prior", help="sweep the prior sharpness")
    common(p_ap)
    p_ap.set_defaults(func=cmd_ablate_prior)

    p_val = sub.add_parser("validate", help="run sampler/inference diagnostics")
    common(p_val, needs_config=False)
    p_val.add_argument("--alpha", type=float, action="append",
                       default=None, help="tail exponent(s) to check (repeatable)")
    p_val.add_argument("--n", type=int, default=100_000, help="draws per check")
    p_val.set_defaults(func=cmd_validate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "alpha", None) is None and args.command == "validate":
        args.alpha = [1.3, 1.5, 1.8]
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # noqa: BLE001 - map anything else to exit 2
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
