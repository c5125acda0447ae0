"""Reproducible random streams.

Every stochastic routine in the package draws from a Philox4x64 counter-based
generator keyed by ``SeedSequence(seed, spawn_key=index)``.  A ``(seed, index)``
pair therefore names one independent stream, and replication ``r`` of an
experiment always sees the same numbers no matter how the work is split
between workers.
"""

from __future__ import annotations

import os

import numpy as np

SEED_ENV = "GRAPHSTEIN_SEED"


def stream(seed: int, *index: int) -> np.random.Generator:
    """Generator for stream ``index`` under ``seed``."""
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(i) for i in index))
    return np.random.Generator(np.random.Philox(ss))


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return stream(int(seed))


def resolve_seed(seed: int | None) -> int | None:
    """Explicit seed wins; otherwise fall back to ``$GRAPHSTEIN_SEED``."""
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None or env.strip() == "":
        return None
    return int(env)
