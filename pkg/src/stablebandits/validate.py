"""Self-diagnostics for the sampling and inference layer.

Each check draws fresh seeded samples and compares against an analytic or
independently computed reference; the CLI's ``validate`` subcommand runs the
battery and fails the process if any check fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import stable
from .gof import KS_COEFF_1PCT, cauchy_cdf, ks_statistic, ks_two_sample, normal_cdf
from .rngutil import derive_stream
from .smin import likelihood_envelope
from .stable import MomentSpec, StableParams, abs_moment

# Stream tags for the validation battery
_TAG = {
    "gauss": 100, "cauchy": 101, "symmetry": 102, "sum": 103, "scale": 104,
    "mean": 105, "moment": 106, "charfn": 107, "tail": 108,
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    statistic: float
    threshold: float
    detail: str

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "statistic": float(self.statistic),
            "threshold": float(self.threshold),
            "detail": self.detail,
        }


def check_gaussian_reduction(seed: int, n: int) -> CheckResult:
    """alpha=2 draws must pass KS against N(mu, 2 sigma^2)."""
    rng = derive_stream(seed, _TAG["gauss"])
    p = StableParams(2.0, 0.0, 1.0, 0.0)
    xs = stable.sample(p, rng, size=n)
    gof = ks_statistic(xs, lambda x: normal_cdf(x, 0.0, math.sqrt(2.0)))
    return CheckResult("gaussian_reduction_ks", not gof.reject_at_1pct,
                       gof.ks_statistic, KS_COEFF_1PCT / math.sqrt(n),
                       f"n={n} vs N(0, 2)")


def check_cauchy_reference(seed: int, n: int) -> CheckResult:
    """The analytic alpha=1 reference must pass its own CDF: this validates
    the KS harness itself, not the CMS transform."""
    rng = derive_stream(seed, _TAG["cauchy"])
    xs = stable.sample_cauchy(2.0, -1.0, rng, size=n)
    gof = ks_statistic(xs, lambda x: cauchy_cdf(x, 2.0, -1.0))
    return CheckResult("cauchy_reference_ks", not gof.reject_at_1pct,
                       gof.ks_statistic, KS_COEFF_1PCT / math.sqrt(n),
                       f"n={n} vs Cauchy(2, -1)")


def check_symmetry(alpha: float, seed: int, n: int) -> CheckResult:
    """For beta=0, mu=0 the empirical CDF must satisfy F(-x) ~ 1 - F(x)."""
    rng = derive_stream(seed, _TAG["symmetry"])
    xs = np.sort(stable.sample(StableParams(alpha, 0.0, 1.0, 0.0), rng, size=n))
    bound = 2.0 * KS_COEFF_1PCT / math.sqrt(n)
    worst = 0.0
    for x in (0.25, 0.5, 1.0, 2.0, 5.0, 20.0):
        f_neg = np.searchsorted(xs, -x, side="right") / n
        f_pos = np.searchsorted(xs, x, side="right") / n
        worst = max(worst, abs(f_neg - (1.0 - f_pos)))
    return CheckResult(f"symmetry_alpha{alpha:g}", worst <= bound, worst, bound,
                       f"n={n}, grid of 6 points")


def _closure_check(name: str, alpha: float, seed: int, n: int,
                   observed: np.ndarray, predicted: StableParams) -> CheckResult:
    rng = derive_stream(seed, _TAG[name], 1)
    reference = stable.sample(predicted, rng, size=len(observed))
    gof = ks_two_sample(observed, reference)
    return CheckResult(
        f"closure_{name}_alpha{alpha:g}", not gof.reject_at_1pct,
        gof.ks_statistic, KS_COEFF_1PCT / math.sqrt(gof.n_samples),
        f"n={n} two-sample vs predicted params",
    )


def check_closure_sum(alpha: float, seed: int, n: int) -> CheckResult:
    rng = derive_stream(seed, _TAG["sum"], 0)
    p1 = StableParams(alpha, 0.0, 1.0, 1.0)
    p2 = StableParams(alpha, 0.0, 1.5, 2.0)
    xs = stable.sample(p1, rng, size=n) + stable.sample(p2, rng, size=n)
    return _closure_check("sum", alpha, seed, n, xs, stable.sum_params(p1, p2))


def check_closure_scale(alpha: float, seed: int, n: int) -> CheckResult:
    rng = derive_stream(seed, _TAG["scale"], 0)
    p = StableParams(alpha, 0.0, 3.0, 1.0)
    xs = -2.0 * stable.sample(p, rng, size=n) + 5.0
    return _closure_check("scale", alpha, seed, n, xs, stable.scale_params(p, -2.0, 5.0))


def check_closure_mean(alpha: float, seed: int, n: int, batch: int = 50) -> CheckResult:
    rng = derive_stream(seed, _TAG["mean"], 0)
    p = StableParams(alpha, 0.0, 1.0, 2.0)
    draws = stable.sample(p, rng, size=n * batch).reshape(n, batch)
    xs = draws.mean(axis=1)
    return _closure_check("mean", alpha, seed, n, xs, stable.mean_params(p, batch))


def check_moment_mc(alpha: float, seed: int, n: int) -> CheckResult:
    """Monte-Carlo E|X|^p against the closed-form constant, p = alpha - 0.3.

    Heavy-tailed summands converge slowly (tail index alpha/p), so this
    check draws 30x the base sample count to sit inside the 5% tolerance
    with margin; at the default that is 3e6 draws.
    """
    p_ord = alpha - 0.3
    rng = derive_stream(seed, _TAG["moment"])
    n = 30 * n
    xs = stable.sample(StableParams(alpha, 0.0, 1.0, 0.0), rng, size=n)
    mc = float(np.mean(np.abs(xs) ** p_ord))
    ref = abs_moment(MomentSpec(p_ord, alpha, 1.0))
    rel = abs(mc - ref) / ref
    return CheckResult(f"abs_moment_alpha{alpha:g}", rel <= 0.05, rel, 0.05,
                       f"p={p_ord:g}, mc={mc:.6g}, formula={ref:.6g}, n={n}")


def check_charfn(alpha: float, seed: int, n: int) -> CheckResult:
    """Empirical characteristic function vs the analytic one, in modulus."""
    p = StableParams(alpha, 0.0, 2.0, 3.0)
    rng = derive_stream(seed, _TAG["charfn"])
    xs = stable.sample(p, rng, size=n)
    worst = 0.0
    for x in (0.1, 0.5, 1.0, 2.0):
        ecf = complex(np.mean(np.exp(1j * x * xs)))
        worst = max(worst, abs(ecf - stable.char_fn(p, x)))
    return CheckResult(f"charfn_alpha{alpha:g}", worst <= 0.01, worst, 0.01,
                       f"x grid (0.1, 0.5, 1, 2), n={n}")


def check_tail_asymptote(alpha: float, seed: int, n: int) -> CheckResult:
    """Empirical tail frequency vs the integrated density asymptote.

    P(|X| > x) ~ 2 * asymptote(x) * x / alpha for symmetric laws.  The
    asymptote carries no finite-x error bound, so the tolerance is loose.
    """
    p = StableParams(alpha, 0.0, 1.0, 0.0)
    rng = derive_stream(seed, _TAG["tail"])
    xs = np.abs(stable.sample(p, rng, size=n))
    x0 = 30.0
    frequency = float(np.mean(xs > x0))
    expected = 2.0 * stable.tail_density_asymptote(p, x0) * x0 / alpha
    ratio = frequency / expected if expected > 0 else math.inf
    return CheckResult(f"tail_asymptote_alpha{alpha:g}", 0.5 <= ratio <= 2.0,
                       ratio, 2.0, f"x0={x0}, freq={frequency:.3g}, asym={expected:.3g}")


def check_envelope() -> CheckResult:
    """The rejection envelope must dominate N(v; 0, lam sigma^2) over lam,
    and be attained at lam = v^2 / sigma^2."""
    worst_excess = -math.inf
    worst_gap = math.inf
    for v in (0.05, 0.5, 1.0, 3.0, 25.0):
        for sigma in (0.5, 1.0, 2500.0):
            peak_lam = (v / sigma) ** 2
            lam = np.concatenate([
                np.geomspace(peak_lam * 1e-6, peak_lam * 1e6, 2001), [peak_lam]])
            env = likelihood_envelope(v)
            dens = np.exp(-v * v / (2.0 * lam * sigma * sigma)) / np.sqrt(
                2.0 * math.pi * lam) / sigma
            worst_excess = max(worst_excess, float(dens.max()) / env - 1.0)
            worst_gap = min(worst_gap, float(dens.max()) / env)
    passed = worst_excess <= 1e-9 and worst_gap >= 1.0 - 1e-9
    return CheckResult("likelihood_envelope", passed, worst_excess, 1e-9,
                       "sup over lam grid and peak attainment")


def run_validation(alphas=(1.3, 1.5, 1.8), n: int = 100_000, seed: int = 0) -> list[CheckResult]:
    """The full battery; deterministic given (alphas, n, seed)."""
    results = [
        check_gaussian_reduction(seed, n),
        check_cauchy_reference(seed, n),
        check_envelope(),
    ]
    for alpha in alphas:
        results.append(check_symmetry(alpha, seed, n))
        results.append(check_closure_sum(alpha, seed, n))
        results.append(check_closure_scale(alpha, seed, n))
        results.append(check_closure_mean(alpha, seed, max(n // 10, 1000)))
        results.append(check_moment_mc(alpha, seed, max(n, 10_000)))
        results.append(check_charfn(alpha, seed, n))
        results.append(check_tail_asymptote(alpha, seed, max(n, 100_000)))
    return results
