"""Deterministic random-stream plumbing.

Every sampling operation in this package takes an explicit
``numpy.random.Generator``.  Streams are derived from a master seed plus an
integer path, so replications, arms, and policies each own an independent
stream and the whole experiment is reproducible bit-for-bit.

Normal variates are produced by an explicit Box-Muller transform of two
uniforms rather than ``Generator.normal`` so that a stream's consumption is
fully described by its sequence of ``random()`` doubles.
"""

from __future__ import annotations

import numpy as np


def derive_stream(master_seed: int, *path: int) -> np.random.Generator:
    """Build a PCG64 generator keyed by ``(master_seed, *path)``."""
    if master_seed < 0:
        raise ValueError("master_seed must be non-negative")
    ss = np.random.SeedSequence((int(master_seed),) + tuple(int(p) for p in path))
    return np.random.Generator(np.random.PCG64(ss))


def stream_fingerprint(master_seed: int, *path: int) -> int:
    """A stable 64-bit label for a derived stream (for manifests/logs)."""
    ss = np.random.SeedSequence((int(master_seed),) + tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def standard_normals(rng: np.random.Generator, size: int | None = None):
    """N(0,1) draws via Box-Muller (cosine branch), one per call element.

    Consumes two uniforms per variate.  ``size=None`` returns a scalar.
    """
    n = 1 if size is None else int(size)
    u1 = 1.0 - rng.random(n)  # in (0, 1], keeps log finite
    u2 = rng.random(n)
    z = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
    if size is None:
        return float(z[0])
    return z


def normal_draw(rng: np.random.Generator, mean: float, sd: float) -> float:
    """One N(mean, sd^2) draw through the shared Box-Muller path."""
    return mean + sd * standard_normals(rng)
