"""Cycle coupling for vectors of anti-symmetric permutation statistics.

``W' = W(pi o (I, I+1, ..., n))`` with ``I`` uniform.  The pair has equal
marginals and drift ``E^pi (W' - W) = -(2/n) W``, but is not exchangeable, so
it goes through the equal-marginal constructor with ``lambda = 2/n``.
"""

from __future__ import annotations

import itertools

import numpy as np

from ..permstat import (
    StatMatrix,
    builtin_matrices,
    fulman_increments,
    perm_stat,
    random_permutations,
    upper_row_sums_batch,
)
from .bounds import ConditionalMoments
from .core import CouplingModel, from_equal_marginal_lambda

ENUMERATION_MAX_N = 7


def _stat_vector(mats, pi) -> np.ndarray:
    return np.array([perm_stat(m, pi) for m in mats])


class PermutationConditioner:
    """Conditions on ``pi``; the position ``I`` is averaged exactly."""

    def __init__(self, mats: list[StatMatrix]):
        self.mats = list(mats)
        self.n = self.mats[0].n
        self.dim = len(self.mats)
        self.lam = 2.0 / self.n

    def draw(self, rng):
        return random_permutations(rng, self.n, 1)[0]

    def moments(self, pi) -> ConditionalMoments:
        d = fulman_increments(self.mats, pi)
        return ConditionalMoments.from_rows(d / (2 * self.lam), d)


def descent_inversion_matrices(n: int) -> list[StatMatrix]:
    return [builtin_matrices(n, "descent"), builtin_matrices(n, "inversion")]


def permutation_coupling(mats: list[StatMatrix] | None = None, n: int | None = None) -> CouplingModel:
    """Cycle coupling for ``W = (perm_stat(M_r, pi))_r``; defaults to the
    scaled descent and inversion matrices of size ``n``."""
    if mats is None:
        if n is None:
            raise ValueError("give the matrices or n")
        mats = descent_inversion_matrices(n)
    mats = list(mats)
    n = mats[0].n
    if any(m.n != n for m in mats):
        raise ValueError("all matrices must have the same size")
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    lam = 2.0 / n

    enumeration = None
    if n <= ENUMERATION_MAX_N:
        perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
        k = len(perms)
        w = np.array([_stat_vector(mats, pi) for pi in perms])
        d = np.stack([fulman_increments(mats, pi) for pi in perms])
        rows_w = np.repeat(w, n, axis=0)
        enumeration = (
            np.full(k * n, 1.0 / (k * n)),
            rows_w,
            rows_w + d.reshape(k * n, -1),
            np.repeat(np.arange(k), n),
        )

    def sampler(rng):
        pi = random_permutations(rng, n, 1)[0]
        i = rng.integers(n)
        w = _stat_vector(mats, pi)
        return w, w + fulman_increments(mats, pi)[i]

    model = from_equal_marginal_lambda(
        lam, enumeration=enumeration, sampler=sampler, name=f"cycle coupling n={n}"
    )
    return CouplingModel(
        model.dim,
        model.name,
        model.sampler,
        model.enumerator,
        PermutationConditioner(mats),
        variant=model.variant,
        lam=lam,
        info={"n": n},
    )


def drift_samples(mats: list[StatMatrix], rng: np.random.Generator, size: int) -> np.ndarray:
    """Rows of ``(W' - W) + (2/n) W`` for independent ``(pi, I)`` draws."""
    n = mats[0].n
    perms = random_permutations(rng, n, size)
    idx = rng.integers(n, size=size)
    out = np.empty((size, len(mats)))
    for r, m in enumerate(mats):
        rows = upper_row_sums_batch(m, perms)
        out[:, r] = -2.0 * rows[np.arange(size), idx] + (2.0 / n) * rows.sum(axis=1)
    return out
