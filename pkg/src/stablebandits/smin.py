"""Scale-mixture-of-normals posterior machinery.

A symmetric stable reward r admits the representation r ~ N(mu, lam*sigma^2)
with lam drawn from the positive stable law S_{alpha/2}(1, 1, 0).  Given the
auxiliary lam values, the posterior over the arm mean is conjugate normal and
is carried in accumulator form: D = sum(1/lam) + 1 and N = sum(r/lam), so the
posterior is N((mu0 + N)/D, sigma^2/D).

The lam conditional has no analytic form; it is sampled by rejection against
the positive stable prior, using the bounded likelihood of the centered
reward as the acceptance function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .rngutil import normal_draw

# Below this fraction of sigma the envelope blows up; fall back to a prior draw.
DEGENERATE_V_FRACTION = 1e-12

# Candidate budget for one lam draw before falling back to the prior.
MAX_REJECTION_ATTEMPTS = 10_000

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class RejectionBudgetError(RuntimeError):
    """Rejection sampler exhausted its candidate budget.

    Carries the last prior draw so the caller can substitute it.
    """

    def __init__(self, last_prior_draw: float, attempts: int):
        super().__init__(f"no acceptance in {attempts} candidate draws")
        self.last_prior_draw = last_prior_draw
        self.attempts = attempts


@dataclass(frozen=True)
class PosteriorState:
    """Per-arm accumulators plus prior mean and the shared scale.

    D >= 1 always (it starts at 1 and every observation adds 1/lam > 0), so
    the posterior variance sigma^2/D never exceeds the prior variance.
    """

    D: float
    N: float
    mu0: float
    sigma: float

    def __post_init__(self):
        if not (self.D >= 1.0):
            raise ValueError(f"precision accumulator must be >= 1, got {self.D}")
        if not (self.sigma > 0.0):
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @classmethod
    def fresh(cls, mu0: float, sigma: float) -> "PosteriorState":
        return cls(1.0, 0.0, mu0, sigma)


@dataclass(frozen=True)
class LambdaDraw:
    """An accepted auxiliary value and the candidates it took to get it."""

    value: float
    attempts: int

    def __post_init__(self):
        if not (self.value > 0.0):
            raise ValueError(f"auxiliary draw must be positive, got {self.value}")
        if self.attempts < 1:
            raise ValueError("attempts counts the accepted candidate too")


@dataclass
class InferenceDiagnostics:
    """Counters for the fallback paths of the auxiliary sampler."""

    lambda_draws: int = 0
    total_attempts: int = 0
    degenerate_v: int = 0
    budget_exhausted: int = 0

    def as_dict(self) -> dict:
        return {
            "lambda_draws": self.lambda_draws,
            "total_attempts": self.total_attempts,
            "degenerate_v": self.degenerate_v,
            "budget_exhausted": self.budget_exhausted,
        }

    def merge(self, other: "InferenceDiagnostics") -> None:
        self.lambda_draws += other.lambda_draws
        self.total_attempts += other.total_attempts
        self.degenerate_v += other.degenerate_v
        self.budget_exhausted += other.budget_exhausted


def likelihood_envelope(v: float) -> float:
    """sup over lam > 0 of N(v; 0, lam*sigma^2); independent of sigma.

    The supremum sits at lam*sigma^2 = v^2, giving exp(-1/2)/(|v| sqrt(2 pi)).
    Unbounded at v = 0, hence the domain error there.
    """
    if v == 0.0:
        raise ValueError("envelope is unbounded at v = 0")
    return math.exp(-0.5) * _INV_SQRT_2PI / abs(v)


_MIXING_CONSTS: dict = {}


def _mixing_constants(alpha: float) -> tuple[float, float, float, float]:
    """CMS constants for the positive stable mixing law S_{alpha/2}(1, 1, 0).

    For beta = 1 and exponent a = alpha/2 < 1 the angle shift is exactly
    pi/2 and the scale factor is cos(pi a / 2)^(-1/a).
    """
    try:
        return _MIXING_CONSTS[alpha]
    except KeyError:
        a = alpha / 2.0
        consts = (
            a,
            math.cos(math.pi * a / 2.0) ** (-1.0 / a),
            1.0 / a,
            (1.0 - a) / a,
        )
        _MIXING_CONSTS[alpha] = consts
        return consts


def _positive_stable_from_uniforms(alpha: float, u1: np.ndarray,
                                   u2: np.ndarray) -> np.ndarray:
    a, scale, inv_a, tail_exp = _mixing_constants(alpha)
    v = np.pi * (u1 - 0.5)
    w = -np.log1p(-u2)
    np.maximum(w, 1e-300, out=w)
    shifted = a * (v + math.pi / 2.0)
    return (scale * np.sin(shifted) / np.cos(v) ** inv_a
            * (np.cos(v - shifted) / w) ** tail_exp)


def _positive_stable_batch(alpha: float, rng: np.random.Generator, n: int) -> np.ndarray:
    """n draws from the mixing law S_{alpha/2}(1, 1, 0) via the CMS transform."""
    u = rng.random((2, n))
    return _positive_stable_from_uniforms(alpha, u[0], u[1])


def rejection_sample_lambda(
    v: float,
    sigma: float,
    alpha: float,
    rng: np.random.Generator,
    max_attempts: int = MAX_REJECTION_ATTEMPTS,
) -> LambdaDraw:
    """Draw lam from its conditional given a centered reward v.

    Candidates come from the positive stable prior; each is accepted with
    probability N(v; 0, lam*sigma^2) / envelope(v).  Near-zero v (below
    1e-12 * sigma) falls back to a plain prior draw, and exhausting
    ``max_attempts`` raises ``RejectionBudgetError`` carrying the last
    candidate so the caller can substitute it.
    """
    if not (1.0 < alpha < 2.0):
        raise ValueError(f"alpha must be in (1, 2), got {alpha}")
    if not (sigma > 0.0):
        raise ValueError(f"sigma must be positive, got {sigma}")
    if max_attempts < 1:
        raise ValueError("max_attempts must be at least 1")

    if abs(v) < DEGENERATE_V_FRACTION * sigma:
        lam = float(_positive_stable_batch(alpha, rng, 1)[0])
        return LambdaDraw(lam, 1)

    env = likelihood_envelope(v)
    half_vsq = 0.5 * (v / sigma) ** 2
    norm = _INV_SQRT_2PI / sigma
    attempts = 0
    batch = 8
    lam = None
    while attempts < max_attempts:
        m = min(batch, max_attempts - attempts)
        u = rng.random((3, m))
        lam = _positive_stable_from_uniforms(alpha, u[0], u[1])
        density = norm / np.sqrt(lam) * np.exp(-half_vsq / lam)
        accepted = u[2] * env <= density
        hit = int(np.argmax(accepted))
        if accepted[hit]:
            return LambdaDraw(float(lam[hit]), attempts + hit + 1)
        attempts += m
        batch = min(batch * 2, 4096)
    raise RejectionBudgetError(float(lam[-1]), attempts)


def posterior_params(state: PosteriorState) -> tuple[float, float]:
    """Posterior (mean, variance) of the arm mean under the accumulators."""
    return (state.mu0 + state.N) / state.D, state.sigma ** 2 / state.D


def commit(state: PosteriorState, r: float, lam: float) -> PosteriorState:
    """Fold one reward with its auxiliary value into the accumulators."""
    if not (lam > 0.0):
        raise ValueError(f"auxiliary value must be positive, got {lam}")
    return PosteriorState(state.D + 1.0 / lam, state.N + r / lam, state.mu0, state.sigma)


class RefineResult(NamedTuple):
    lam: LambdaDraw
    mu: float
    tail_lams: tuple[float, ...]


def gibbs_refine(
    state: PosteriorState,
    r: float,
    current_mu: float,
    alpha: float,
    sweeps: int,
    rng: np.random.Generator,
    *,
    window: int = 1,
    tail: Sequence[tuple[float, float]] = (),
    max_attempts: int = MAX_REJECTION_ATTEMPTS,
    diag: InferenceDiagnostics | None = None,
) -> RefineResult:
    """Alternate (lam | v) and (mu | lam) draws for the newest reward.

    Each sweep centers the pending rewards at the current mean draw, redraws
    their auxiliaries, rebuilds provisional accumulators on top of ``state``,
    and redraws the mean from the implied conjugate normal.  ``state`` is not
    mutated; the caller commits the returned auxiliary draw(s).

    Only the newest reward is resampled by default.  ``window > 1`` also
    resamples the most recent ``window - 1`` committed rewards, supplied via
    ``tail`` as (reward, committed_lam) pairs, oldest first; their old
    contributions are stripped from the provisional accumulators and the
    returned ``tail_lams`` are their replacements.
    """
    if sweeps < 1:
        raise ValueError("need at least one sweep")
    if window < 1:
        raise ValueError("window must be at least 1")
    use_tail = list(tail)[-(window - 1):] if window > 1 else []
    base_d = state.D
    base_n = state.N
    for tr, tlam in use_tail:
        base_d -= 1.0 / tlam
        base_n -= tr / tlam
    if base_d < 1.0 - 1e-9:
        raise ValueError("tail contributions exceed the committed accumulators")
    base_d = max(base_d, 1.0)

    pending = [tr for tr, _ in use_tail] + [r]
    lams: list[LambdaDraw] = [LambdaDraw(1.0, 1)] * len(pending)
    mu = current_mu
    sigma = state.sigma
    for _ in range(sweeps):
        d_q = base_d
        n_q = base_n
        for j, rj in enumerate(pending):
            v = rj - mu
            try:
                draw = rejection_sample_lambda(v, sigma, alpha, rng, max_attempts)
            except RejectionBudgetError as exc:
                draw = LambdaDraw(exc.last_prior_draw, exc.attempts)
                if diag is not None:
                    diag.budget_exhausted += 1
            if diag is not None:
                diag.lambda_draws += 1
                diag.total_attempts += draw.attempts
                if abs(v) < DEGENERATE_V_FRACTION * sigma:
                    diag.degenerate_v += 1
            lams[j] = draw
            d_q += 1.0 / draw.value
            n_q += rj / draw.value
        mu = normal_draw(rng, (state.mu0 + n_q) / d_q, sigma / math.sqrt(d_q))
    return RefineResult(lams[-1], mu, tuple(l.value for l in lams[:-1]))
