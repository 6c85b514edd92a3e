"""Gamma function via the Lanczos approximation.

Self-contained so the moment constants and truncation levels do not pull in
a heavy dependency; accuracy is ~1e-13 relative on the ranges used here
(|x| < 30, x not a non-positive integer), checked against ``math.gamma``.
"""

from __future__ import annotations

import math

# Lanczos coefficients for g = 7, n = 9 (Godfrey's set).
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(x: float) -> float:
    """Gamma function for real ``x``, poles at non-positive integers.

    Uses the reflection formula for x < 0.5, so negative non-integer
    arguments (needed by the stable moment constants) are supported.
    """
    if math.isnan(x) or math.isinf(x):
        raise ValueError(f"gamma argument must be finite, got {x}")
    if x <= 0.0 and x == math.floor(x):
        raise ValueError(f"gamma pole at non-positive integer {x}")
    if x < 0.5:
        # Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    z = x - 1.0
    acc = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        acc += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * acc
