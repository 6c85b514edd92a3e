"""Symmetric/skewed alpha-stable distributions: parameters, exact sampling,
characteristic function, closure algebra, and absolute-moment formulas.

Sampling uses the Chambers-Mallows-Stuck (CMS) transform, which maps one
uniform variate on (-pi/2, pi/2) and one unit-exponential variate to an
exact standard stable draw for any exponent != 1.  The transform itself is
exposed (``sample_standard``) so it can be tested deterministically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import gamma


class DomainError(ValueError):
    """A parameter is outside its admissible domain; ``field`` names it."""

    def __init__(self, field: str, message: str):
        super().__init__(message)
        self.field = field


@dataclass(frozen=True)
class StableParams:
    """Parameter tuple of a stable law: exponent, skewness, scale, location.

    alpha in (0, 2], beta in [-1, 1], sigma > 0, mu finite.  alpha = 2 is the
    Gaussian member (variance 2*sigma^2); beta = 0 gives symmetric laws;
    beta = 1 with alpha < 1 gives positive support.
    """

    alpha: float
    beta: float
    sigma: float
    mu: float


def validate_params(p: StableParams) -> StableParams:
    """Return ``p`` unchanged if every field is in its domain, else raise."""
    if not (0.0 < p.alpha <= 2.0) or math.isnan(p.alpha):
        raise DomainError("alpha", f"alpha must be in (0, 2], got {p.alpha}")
    if not (-1.0 <= p.beta <= 1.0) or math.isnan(p.beta):
        raise DomainError("beta", f"beta must be in [-1, 1], got {p.beta}")
    if not (p.sigma > 0.0) or math.isinf(p.sigma):
        raise DomainError("sigma", f"sigma must be positive and finite, got {p.sigma}")
    if not math.isfinite(p.mu):
        raise DomainError("mu", f"mu must be finite, got {p.mu}")
    return p


def sample_standard(alpha, beta, v, w):
    """CMS transform: map (v, w) to a standard stable draw S_alpha(beta, 1, 0).

    v is the uniform angle in (-pi/2, pi/2), w the unit-exponential draw.
    Accepts scalars or arrays; alpha = 1 is outside the transform's domain.
    """
    if not (0.0 < alpha <= 2.0):
        raise DomainError("alpha", f"alpha must be in (0, 2], got {alpha}")
    if alpha == 1.0:
        raise DomainError("alpha", "CMS transform requires alpha != 1")
    if not (-1.0 <= beta <= 1.0):
        raise DomainError("beta", f"beta must be in [-1, 1], got {beta}")
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    if np.any(np.abs(v) >= np.pi / 2.0):
        raise DomainError("v", "v must lie in (-pi/2, pi/2)")
    if np.any(w <= 0.0):
        raise DomainError("w", "w must be positive")

    tan_half = math.tan(math.pi * alpha / 2.0)
    b = math.atan(beta * tan_half) / alpha
    s = (1.0 + beta * beta * tan_half * tan_half) ** (1.0 / (2.0 * alpha))
    y = (
        s
        * np.sin(alpha * (v + b))
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos(v - alpha * (v + b)) / w) ** ((1.0 - alpha) / alpha)
    )
    if y.ndim == 0:
        return float(y)
    return y


def sample(p: StableParams, rng: np.random.Generator, size: int | None = None):
    """Draw from S_alpha(beta, sigma, mu) via CMS; requires alpha != 1.

    Consumes 2*n uniforms from ``rng`` (angle and exponential per draw).
    ``size=None`` returns a scalar, otherwise an array of ``size`` draws.
    """
    validate_params(p)
    if p.alpha == 1.0:
        raise DomainError("alpha", "sampler requires alpha != 1; "
                          "use sample_cauchy for the alpha = 1 member")
    n = 1 if size is None else int(size)
    u = rng.random((2, n))
    v = np.pi * (u[0] - 0.5)
    w = -np.log1p(-u[1])
    np.maximum(w, 1e-300, out=w)  # guard the w > 0 precondition at u == 0
    x = p.sigma * sample_standard(p.alpha, p.beta, v, w) + p.mu
    if size is None:
        return float(x[0])
    return x


def sample_cauchy(sigma: float, mu: float, rng: np.random.Generator,
                  size: int | None = None):
    """Draw from the alpha = 1 symmetric member via the tangent transform.

    Kept separate from ``sample`` (whose transform excludes alpha = 1); used
    by the validation harness as an analytic reference.
    """
    if sigma <= 0.0:
        raise DomainError("sigma", f"sigma must be positive, got {sigma}")
    n = 1 if size is None else int(size)
    v = np.pi * (rng.random(n) - 0.5)
    x = mu + sigma * np.tan(v)
    if size is None:
        return float(x[0])
    return x


def char_fn(p: StableParams, x: float) -> complex:
    """Characteristic function value at ``x``; alpha = 1 uses the log branch."""
    validate_params(p)
    if x == 0.0:
        return complex(1.0, 0.0)
    if p.alpha == 1.0:
        shape = -(2.0 / math.pi) * math.log(abs(x))
    else:
        shape = math.tan(math.pi * p.alpha / 2.0)
    exponent = (
        1j * x * p.mu
        - abs(p.sigma * x) ** p.alpha * (1.0 - 1j * p.beta * math.copysign(1.0, x) * shape)
    )
    return complex(np.exp(exponent))


@dataclass(frozen=True)
class MomentSpec:
    """Absolute-moment query: order p, exponent alpha, dispersion sigma^alpha."""

    p: float
    alpha: float
    dispersion: float


def moment_constant(p: float, alpha: float) -> float:
    """The constant C(p, alpha) with E|X|^p = C(p, alpha) * dispersion^(p/alpha).

    Defined for 0 < p < alpha with p not an even integer; positive there.
    """
    if p <= 0.0:
        raise DomainError("p", f"moment order must be positive, got {p}")
    if p >= alpha:
        raise DomainError("p", f"moment of order {p} does not exist for alpha={alpha}")
    if p == 2.0 * round(p / 2.0):
        raise DomainError("p", f"moment constant has a pole at even integer p={p}")
    return (
        2.0 ** (p + 1.0)
        * gamma((p + 1.0) / 2.0)
        * gamma(-p / alpha)
        / (alpha * math.sqrt(math.pi) * gamma(-p / 2.0))
    )


def abs_moment(spec: MomentSpec) -> float:
    """E|X|^p for X ~ S_alpha(0, sigma, 0) with dispersion = sigma^alpha.

    With that convention the value equals C(p, alpha) * sigma^p, and the
    Gaussian member reproduces the known normal absolute moment exactly.
    """
    if spec.dispersion <= 0.0:
        raise DomainError("dispersion", f"dispersion must be positive, got {spec.dispersion}")
    c = moment_constant(spec.p, spec.alpha)
    return c * spec.dispersion ** (spec.p / spec.alpha)


def sum_params(p1: StableParams, p2: StableParams) -> StableParams:
    """Parameters of X1 + X2 for independent symmetric stables with equal alpha."""
    validate_params(p1)
    validate_params(p2)
    if p1.alpha != p2.alpha:
        raise DomainError("alpha", f"summands need equal alpha, got {p1.alpha} and {p2.alpha}")
    if p1.beta != 0.0 or p2.beta != 0.0:
        raise DomainError("beta", "sum closure implemented for symmetric (beta = 0) laws")
    a = p1.alpha
    sigma = (p1.sigma ** a + p2.sigma ** a) ** (1.0 / a)
    return StableParams(a, 0.0, sigma, p1.mu + p2.mu)


def scale_params(p: StableParams, a: float, b: float) -> StableParams:
    """Parameters of a*X + b for symmetric stable X; requires a != 0."""
    validate_params(p)
    if p.beta != 0.0:
        raise DomainError("beta", "affine closure implemented for symmetric (beta = 0) laws")
    if a == 0.0:
        raise DomainError("a", "scale factor must be nonzero")
    return StableParams(p.alpha, 0.0, abs(a) * p.sigma, a * p.mu + b)


def mean_params(p: StableParams, n: int) -> StableParams:
    """Parameters of the empirical mean of n i.i.d. symmetric stable draws."""
    validate_params(p)
    if p.beta != 0.0:
        raise DomainError("beta", "mean closure implemented for symmetric (beta = 0) laws")
    if n < 1:
        raise DomainError("n", f"need at least one draw, got {n}")
    return StableParams(p.alpha, 0.0, p.sigma * n ** (1.0 / p.alpha - 1.0), p.mu)


def tail_density_asymptote(p: StableParams, x: float) -> float:
    """Leading power-law density term as |x| -> infinity, for alpha < 2.

    A diagnostic value, not a density: f(x) ~ this expression only in the
    far tail, with no finite-x error bound.
    """
    validate_params(p)
    if p.alpha >= 2.0:
        raise DomainError("alpha", "no power tail at alpha = 2")
    if x == 0.0:
        raise DomainError("x", "asymptote is a tail quantity; x must be nonzero")
    sgn = math.copysign(1.0, x)
    return (
        (1.0 / abs(x) ** (1.0 + p.alpha))
        * p.sigma ** p.alpha
        * (1.0 + sgn * p.beta)
        * math.sin(math.pi * p.alpha / 2.0)
        * gamma(p.alpha + 1.0)
        / math.pi
    )
