"""Bandit environment, regret accounting, and seeded batch replication.

A batch runs R replications of one experiment.  Each replication draws a
fresh instance (arm means), fresh priors, and a reward tape indexed by
(arm, pull-count); every policy in the replication replays the same tape, so
policy comparisons are paired.  All streams derive from the master seed, so
the batch is reproducible number-for-number regardless of thread count.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .policies import Policy, PolicyConfig, make_policy
from .rngutil import derive_stream, stream_fingerprint
from .stable import StableParams, sample

# Stream-path tags under (master_seed, replication)
_TAG_INSTANCE = 0
_TAG_PRIORS = 1
_TAG_TAPE = 2
_TAG_POLICY = 3


@dataclass(frozen=True)
class BanditInstance:
    """K arms sharing (alpha, sigma), each with its own true mean."""

    alpha: float
    sigma: float
    means: tuple[float, ...]

    def __post_init__(self):
        if not (1.0 < self.alpha < 2.0):
            raise ValueError(f"alpha must be in (1, 2), got {self.alpha}")
        if self.sigma <= 0.0:
            raise ValueError("sigma must be positive")
        if len(self.means) == 0:
            raise ValueError("need at least one arm")

    @property
    def n_arms(self) -> int:
        return len(self.means)

    @property
    def mu_star(self) -> float:
        return max(self.means)


@dataclass(frozen=True)
class RegretTrace:
    """Chosen arms plus cumulative and time-averaged pseudo-regret per round.

    Pseudo-regret uses true means, never realized rewards: the realized
    rewards have infinite variance and would swamp any aggregate.
    """

    choices: np.ndarray
    cumulative_regret: np.ndarray
    time_avg: np.ndarray

    @classmethod
    def from_choices(cls, choices: Sequence[int], inst: BanditInstance) -> "RegretTrace":
        arms = np.asarray(choices, dtype=np.int64)
        means = np.asarray(inst.means)
        gaps = inst.mu_star - means[arms]
        cum = np.cumsum(gaps)
        rounds = np.arange(1, len(arms) + 1, dtype=float)
        return cls(arms, cum, cum / rounds)

    @property
    def final_time_avg(self) -> float:
        return float(self.time_avg[-1])


@dataclass(frozen=True)
class ExperimentConfig:
    """Full declarative description of one benchmark batch."""

    n_arms: int
    horizon: int
    replications: int
    alpha: float
    sigma: float
    mean_bound: float
    mean_range: tuple[float, float]
    policies: tuple[PolicyConfig, ...]
    master_seed: int
    prior_mode: str = "uniform"  # "uniform" over mean_range, or "sharpened"
    prior_delta: float = 0.0     # half-width around true means when sharpened

    def __post_init__(self):
        if self.n_arms < 1:
            raise ValueError("need at least one arm")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        lo, hi = self.mean_range
        if not (lo <= hi):
            raise ValueError(f"mean range must satisfy lo <= hi, got ({lo}, {hi})")
        if max(abs(lo), abs(hi)) > self.mean_bound:
            raise ValueError("mean range must lie inside [-M, M]")
        if self.prior_mode not in ("uniform", "sharpened"):
            raise ValueError(f"unknown prior mode {self.prior_mode!r}")
        if self.prior_mode == "sharpened" and self.prior_delta < 0.0:
            raise ValueError("prior_delta must be non-negative")
        if len(self.policies) == 0:
            raise ValueError("need at least one policy")
        labels = [p.label for p in self.policies]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate policy labels: {labels}")
        if self.master_seed < 0:
            raise ValueError("master_seed must be non-negative")


def make_instance(cfg: ExperimentConfig, rng: np.random.Generator) -> BanditInstance:
    """Draw arm means uniformly from the configured range."""
    lo, hi = cfg.mean_range
    means = lo + (hi - lo) * rng.random(cfg.n_arms)
    return BanditInstance(cfg.alpha, cfg.sigma, tuple(float(m) for m in means))


def draw_priors(cfg: ExperimentConfig, inst: BanditInstance,
                rng: np.random.Generator) -> tuple[float, ...]:
    """Prior means: uniform over the mean range, or centered on the truth."""
    if cfg.prior_mode == "uniform":
        lo, hi = cfg.mean_range
        priors = lo + (hi - lo) * rng.random(cfg.n_arms)
    else:
        offsets = cfg.prior_delta * (2.0 * rng.random(cfg.n_arms) - 1.0)
        priors = np.asarray(inst.means) + offsets
    return tuple(float(p) for p in priors)


def pull(inst: BanditInstance, arm: int, rng: np.random.Generator) -> float:
    """One live reward draw from the chosen arm."""
    if not (0 <= arm < inst.n_arms):
        raise IndexError(f"arm {arm} outside [0, {inst.n_arms})")
    return sample(StableParams(inst.alpha, 0.0, inst.sigma, inst.means[arm]), rng)


def make_tape(inst: BanditInstance, horizon: int, master_seed: int,
              replication: int) -> np.ndarray:
    """Pre-draw rewards indexed by (arm, pull-count) from per-arm streams."""
    tape = np.empty((inst.n_arms, horizon))
    for arm in range(inst.n_arms):
        rng = derive_stream(master_seed, replication, _TAG_TAPE, arm)
        params = StableParams(inst.alpha, 0.0, inst.sigma, inst.means[arm])
        tape[arm] = sample(params, rng, size=horizon)
    return tape


def run_experiment(inst: BanditInstance, policy: Policy, horizon: int,
                   rng: np.random.Generator,
                   tape: Optional[np.ndarray] = None) -> RegretTrace:
    """Drive the select/pull/update loop for ``horizon`` rounds.

    With a tape, the j-th pull of arm k always yields tape[k, j], making
    runs across policies paired; without one, rewards are drawn live from
    ``rng``.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    choices = np.empty(horizon, dtype=np.int64)
    pull_counts = [0] * inst.n_arms
    for t in range(1, horizon + 1):
        arm = policy.select(t, rng)
        if tape is not None:
            reward = float(tape[arm, pull_counts[arm]])
        else:
            reward = pull(inst, arm, rng)
        pull_counts[arm] += 1
        policy.update(arm, reward, t, rng)
        choices[t - 1] = arm
    return RegretTrace.from_choices(choices, inst)


@dataclass
class BatchResult:
    """Per-policy traces plus their across-replication aggregates."""

    config: ExperimentConfig
    policy_labels: tuple[str, ...]
    traces: dict[str, list[RegretTrace]]
    mean_time_avg: dict[str, np.ndarray]
    var_time_avg: dict[str, np.ndarray]
    diagnostics: dict[str, dict]
    replication_fingerprints: tuple[int, ...]

    @property
    def final_summary(self) -> dict[str, dict[str, float]]:
        return {
            label: {
                "final_time_avg_mean": float(self.mean_time_avg[label][-1]),
                "final_time_avg_var": float(self.var_time_avg[label][-1]),
            }
            for label in self.policy_labels
        }


def _run_replication(cfg: ExperimentConfig, rep: int) -> tuple[list[RegretTrace], list[dict]]:
    inst = make_instance(cfg, derive_stream(cfg.master_seed, rep, _TAG_INSTANCE))
    priors = draw_priors(cfg, inst, derive_stream(cfg.master_seed, rep, _TAG_PRIORS))
    tape = make_tape(inst, cfg.horizon, cfg.master_seed, rep)
    traces: list[RegretTrace] = []
    diags: list[dict] = []
    for p_idx, pc in enumerate(cfg.policies):
        policy = make_policy(pc, prior_means=priors, n_arms=cfg.n_arms)
        rng = derive_stream(cfg.master_seed, rep, _TAG_POLICY, p_idx)
        traces.append(run_experiment(inst, policy, cfg.horizon, rng, tape=tape))
        diags.append(policy.diagnostics())
    return traces, diags


def run_batch(cfg: ExperimentConfig, threads: int = 1) -> BatchResult:
    """Run every replication (in parallel if asked) and aggregate.

    Aggregation always reduces in replication-index order, so the result is
    identical for any thread count.  A failed replication aborts the batch
    with its index in the error message.
    """
    labels = tuple(p.label for p in cfg.policies)
    reps = range(cfg.replications)
    if threads > 1 and cfg.replications > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_run_replication, cfg, rep) for rep in reps]
            results = []
            for rep, fut in enumerate(futures):
                try:
                    results.append(fut.result())
                except Exception as exc:
                    raise RuntimeError(f"replication {rep} failed: {exc}") from exc
    else:
        results = []
        for rep in reps:
            try:
                results.append(_run_replication(cfg, rep))
            except Exception as exc:
                raise RuntimeError(f"replication {rep} failed: {exc}") from exc

    traces: dict[str, list[RegretTrace]] = {lab: [] for lab in labels}
    diag_totals: dict[str, dict] = {lab: {} for lab in labels}
    for rep_traces, rep_diags in results:
        for lab, trace, diag in zip(labels, rep_traces, rep_diags):
            traces[lab].append(trace)
            for key, val in diag.items():
                diag_totals[lab][key] = diag_totals[lab].get(key, 0) + val

    mean_ta: dict[str, np.ndarray] = {}
    var_ta: dict[str, np.ndarray] = {}
    for lab in labels:
        stacked = np.stack([tr.time_avg for tr in traces[lab]])
        mean_ta[lab] = stacked.mean(axis=0)
        var_ta[lab] = stacked.var(axis=0)  # population variance; 0 for one rep

    fingerprints = tuple(stream_fingerprint(cfg.master_seed, rep) for rep in reps)
    return BatchResult(cfg, labels, traces, mean_ta, var_ta, diag_totals, fingerprints)
