"""Small enumerable couplings used as checks of the coupling layer."""

from __future__ import annotations

import itertools
import math

import numpy as np

from .core import (
    CouplingModel,
    CouplingSample,
    Enumeration,
    from_exchangeable_pair,
    from_local_dependence,
    from_size_bias,
)


def coin_sum(m: int = 4) -> CouplingModel:
    """``W = sum X_i`` for iid fair signs scaled by ``1/sqrt(m)``, ``A_i = {i}``."""
    outcomes = np.array(list(itertools.product([-1.0, 1.0], repeat=m)))
    x = outcomes[:, :, None] / math.sqrt(m)
    probs = np.full(len(outcomes), 0.5**m)
    return from_local_dependence(
        [[i] for i in range(m)],
        enumeration=(probs, x),
        sample_x=lambda rng: rng.choice([-1.0, 1.0], size=(m, 1)) / math.sqrt(m),
        name=f"coin sum m={m}",
    )


def swap_pair(n: int = 6, m: int | None = None) -> CouplingModel:
    """Exchangeable pair from swapping two uniformly chosen coordinates of a
    uniform sign vector, with ``W`` the scaled sum of the first ``m``.

    Only swaps across the split move ``W``, and
    ``E[W' - W | W] = -((n - m) / C(n, 2)) W``.
    """
    m = n // 2 if m is None else m
    if not 0 < m < n:
        raise ValueError(f"need 0 < m < n, got m={m}, n={n}")
    lam = (n - m) / math.comb(n, 2)
    scale = 1.0 / math.sqrt(m)
    signs = np.array(list(itertools.product([-1.0, 1.0], repeat=n)))
    pairs = list(itertools.combinations(range(n), 2))
    w, wp, state = [], [], []
    for k, x in enumerate(signs):
        base = x[:m].sum() * scale
        for i, j in pairs:
            y = x.copy()
            y[i], y[j] = y[j], y[i]
            w.append(base)
            wp.append(y[:m].sum() * scale)
            state.append(k)
    probs = np.full(len(w), 1.0 / len(w))

    def sampler(rng):
        x = rng.choice([-1.0, 1.0], size=n)
        i, j = rng.choice(n, size=2, replace=False)
        y = x.copy()
        y[i], y[j] = y[j], y[i]
        return x[:m].sum() * scale, y[:m].sum() * scale

    return from_exchangeable_pair(
        [[lam]],
        enumeration=(probs, np.array(w)[:, None], np.array(wp)[:, None], np.array(state)),
        sampler=sampler,
        name=f"swap pair n={n} m={m}",
    )


def _flip_sampler(rng):
    w = rng.choice([-1.0, 1.0])
    return w, -w


def sign_flip() -> CouplingModel:
    """``W = +-1`` fair and ``W' = -W``.  The drift ``W' - W = -2W`` fixes
    ``Lambda = 2``, so ``G = -W / 2``."""
    w = np.array([[-1.0], [1.0]])
    return from_exchangeable_pair(
        [[2.0]],
        enumeration=(np.array([0.5, 0.5]), w, -w),
        sampler=_flip_sampler,
        name="sign flip",
    )


def bernoulli_size_bias(p: float = 0.3) -> CouplingModel:
    return from_size_bias(
        pmf=(np.array([[0.0], [1.0]]), np.array([1 - p, p])), name=f"Bernoulli({p}) size bias"
    )


def overlapping_bernoulli_size_bias() -> CouplingModel:
    """``Y = (B1 + B2, B2 + B3)`` with independent fair bits."""
    bits = np.array(list(itertools.product([0.0, 1.0], repeat=3)))
    support = np.column_stack([bits[:, 0] + bits[:, 1], bits[:, 1] + bits[:, 2]])
    return from_size_bias(pmf=(support, np.full(8, 1 / 8)), name="overlapping Bernoulli size bias")


def zero_coupling(dim: int = 1) -> CouplingModel:
    """``W = W' = G = 0`` almost surely."""
    zero = np.zeros((1, dim))

    def enumerator():
        return Enumeration(np.ones(1), CouplingSample(zero, zero, zero), np.zeros(1, dtype=int))

    def sampler(rng, size):
        z = np.zeros((size, dim))
        return CouplingSample(z, z, z)

    return CouplingModel(dim, "zero coupling", sampler, enumerator)
