"""Kolmogorov-Smirnov goodness-of-fit checks and reference CDFs.

These are the oracles the rest of the repo leans on: one-sample KS against
an analytic CDF, two-sample KS for distributional closure checks, and the
normal/Cauchy/uniform reference CDFs.  Reject decisions use the asymptotic
1% critical value 1.628/sqrt(n); that approximation is meant for n >= 1000,
which every diagnostic in this package satisfies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

# Asymptotic two-sided KS critical coefficient at the 1% level.
KS_COEFF_1PCT = 1.628


@dataclass(frozen=True)
class GoodnessOfFit:
    """KS sup-distance, the (effective) sample count, and the 1% verdict."""

    ks_statistic: float
    n_samples: int
    reject_at_1pct: bool


def _eval_cdf(cdf: Callable, xs: np.ndarray) -> np.ndarray:
    """Evaluate a CDF callable on an array, tolerating scalar-only callables."""
    try:
        out = np.asarray(cdf(xs), dtype=float)
        if out.shape == xs.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.fromiter((cdf(float(x)) for x in xs), dtype=float, count=len(xs))


def ks_statistic(samples, cdf: Callable) -> GoodnessOfFit:
    """One-sample KS test of ``samples`` against a reference CDF.

    Returns the exact sup-distance between the empirical CDF and ``cdf``
    plus the asymptotic 1%-level reject flag.
    """
    xs = np.sort(np.asarray(samples, dtype=float))
    n = xs.size
    if n == 0:
        raise ValueError("need at least one sample")
    f = _eval_cdf(cdf, xs)
    if np.any(f < 0.0) or np.any(f > 1.0):
        raise ValueError("cdf values must lie in [0, 1]")
    grid = np.arange(n, dtype=float)
    d_plus = np.max((grid + 1.0) / n - f)
    d_minus = np.max(f - grid / n)
    d = float(max(d_plus, d_minus))
    return GoodnessOfFit(d, int(n), d > KS_COEFF_1PCT / math.sqrt(n))


def ks_two_sample(a, b) -> GoodnessOfFit:
    """Two-sample KS test; n_samples is the effective n1*n2/(n1+n2)."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    n1, n2 = a.size, b.size
    if n1 == 0 or n2 == 0:
        raise ValueError("need at least one sample on each side")
    grid = np.concatenate([a, b])
    cdf1 = np.searchsorted(a, grid, side="right") / n1
    cdf2 = np.searchsorted(b, grid, side="right") / n2
    d = float(np.max(np.abs(cdf1 - cdf2)))
    n_eff = n1 * n2 / (n1 + n2)
    return GoodnessOfFit(d, int(n_eff), d > KS_COEFF_1PCT / math.sqrt(n_eff))


_erf = np.vectorize(math.erf, otypes=[float])


def normal_cdf(x, mean: float = 0.0, sd: float = 1.0):
    """CDF of N(mean, sd^2); accepts scalars or arrays."""
    z = (np.asarray(x, dtype=float) - mean) / (sd * math.sqrt(2.0))
    out = 0.5 * (1.0 + _erf(z))
    if out.ndim == 0:
        return float(out)
    return out


def cauchy_cdf(x, sigma: float = 1.0, mu: float = 0.0):
    """CDF of the Cauchy law with scale sigma and location mu."""
    out = 0.5 + np.arctan((np.asarray(x, dtype=float) - mu) / sigma) / np.pi
    if out.ndim == 0:
        return float(out)
    return out
