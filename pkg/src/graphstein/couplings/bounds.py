"""Error-bound ingredients for multivariate normal approximation by Stein couplings.

For a coupling with ``D = W' - W`` the bound involves ``sup|G|``, ``sup|D|``,
``E|D|^2`` and the standard deviations of conditional expectations

    B1 = sd E^F |D|^2
    B2 = sum_ij sd E^F (G_i D_j)
    B3 = sum_ijk sd E^F (G_i D_j D_k)
    B4 = sum_i sd E^F D_i^2

where ``F`` is any sigma-field containing ``sigma(W)``.  Conditioners supply,
for one draw of the conditioning state, exact conditional moments averaged over
the remaining (index) randomness; the outer variances are then estimated by
Monte Carlo, or computed exactly for enumerable models.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Protocol

import numpy as np

from ..rng import stream
from .core import CouplingModel, Enumeration, local_dependence_rows


@dataclass(frozen=True)
class ConditionalMoments:
    gd: np.ndarray  # E^F[G_i D_j]
    dd: np.ndarray  # E^F[D_i D_j]
    gdd: np.ndarray  # E^F[G_i D_j D_k]
    g_max: float
    d_max: float

    @classmethod
    def from_rows(cls, g: np.ndarray, d: np.ndarray, weights: np.ndarray | None = None):
        if weights is None:
            weights = np.full(g.shape[0], 1.0 / g.shape[0])
        gd = np.einsum("k,ki,kj->ij", weights, g, d)
        dd = np.einsum("k,ki,kj->ij", weights, d, d)
        gdd = np.einsum("k,ki,kj,kl->ijl", weights, g, d, d)
        support = weights > 0
        g_max = float(np.linalg.norm(g[support], axis=1).max(initial=0.0))
        d_max = float(np.linalg.norm(d[support], axis=1).max(initial=0.0))
        return cls(gd, dd, gdd, g_max, d_max)

    def flat(self) -> np.ndarray:
        """``[|D|^2, gd, dd diagonal, gdd]`` flattened into one vector."""
        return np.concatenate(
            [[np.trace(self.dd)], self.gd.ravel(), np.diag(self.dd), self.gdd.ravel()]
        )


class Conditioner(Protocol):
    dim: int

    def draw(self, rng: np.random.Generator): ...

    def moments(self, state) -> ConditionalMoments: ...


class EnumerationConditioner:
    """Exact conditional moments from an enumeration grouped by ``state``,
    or by the value of ``W`` when no state is recorded."""

    def __init__(self, enum: Enumeration):
        self.enum = enum
        self.dim = enum.sample.dim
        if enum.state is None:
            labels, inverse = np.unique(enum.sample.w, axis=0, return_inverse=True)
        else:
            labels, inverse = np.unique(enum.state, return_inverse=True)
        self.labels = labels
        self._inverse = inverse.ravel()
        self.state_prob = np.bincount(self._inverse, weights=enum.prob)
        self._order = np.argsort(self._inverse, kind="stable")
        self._starts = np.concatenate([[0], np.cumsum(np.bincount(self._inverse))])

    def draw(self, rng):
        return int(rng.choice(len(self.state_prob), p=self.state_prob))

    def moments(self, state) -> ConditionalMoments:
        rows = self._order[self._starts[state] : self._starts[state + 1]]
        w = self.enum.prob[rows] / self.state_prob[state]
        s = self.enum.sample
        return ConditionalMoments.from_rows(s.g[rows], s.diff[rows], w)

    def all_moments(self):
        return [self.moments(k) for k in range(len(self.state_prob))], self.state_prob

    def flat_table(self):
        """Every state's flattened moments at once, plus per-state sups."""
        s = self.enum.sample
        order, starts = self._order, self._starts[:-1]
        g, dv = s.g[order], s.diff[order]
        w = (self.enum.prob / self.state_prob[self._inverse])[order]
        d = g.shape[1]
        cols = [(dv * dv).sum(axis=1)]
        cols += [g[:, i] * dv[:, j] for i in range(d) for j in range(d)]
        cols += [dv[:, i] ** 2 for i in range(d)]
        cols += [g[:, i] * dv[:, j] * dv[:, k] for i in range(d) for j in range(d) for k in range(d)]
        table = np.add.reduceat(w[:, None] * np.column_stack(cols), starts, axis=0)
        live = w > 0
        g_max = np.maximum.reduceat(np.where(live, np.linalg.norm(g, axis=1), 0.0), starts)
        d_max = np.maximum.reduceat(np.where(live, np.linalg.norm(dv, axis=1), 0.0), starts)
        return table, g_max, d_max


class LocalDependenceConditioner:
    """Conditions on all summands; the uniform index is averaged out exactly."""

    def __init__(self, neighbourhoods: np.ndarray, sample_x):
        self.nb = neighbourhoods
        self.sample_x = sample_x
        self.dim = None

    def draw(self, rng):
        return np.asarray(self.sample_x(rng), dtype=float)

    def moments(self, x) -> ConditionalMoments:
        _, d, g = local_dependence_rows(self.nb, x)
        return ConditionalMoments.from_rows(g, d)


@dataclass(frozen=True)
class BoundTerms:
    alpha_sup: float
    beta_sup: float
    e_d2: float
    b1: float
    b2: float
    b3: float
    b4: float
    se: dict
    reps: int | None = None
    exact: bool = False

    def to_dict(self) -> dict:
        return asdict(self)


def _split(flat: np.ndarray, d: int):
    i = 0
    d2 = flat[..., i]
    i += 1
    gd = flat[..., i : i + d * d]
    i += d * d
    ddiag = flat[..., i : i + d]
    i += d
    gdd = flat[..., i : i + d**3]
    return d2, gd, ddiag, gdd


def _terms(sd: np.ndarray, d: int) -> np.ndarray:
    """(b1, b2, b3, b4) from the standard deviations of the flattened moments."""
    s_d2, s_gd, s_ddiag, s_gdd = _split(sd, d)
    return np.stack([s_d2, s_gd.sum(-1), s_gdd.sum(-1), s_ddiag.sum(-1)], axis=-1)


def _zero_floor(var: np.ndarray) -> np.ndarray:
    return np.sqrt(np.maximum(var, 0.0))


def terms_from_states(moments: list[ConditionalMoments], weights=None) -> BoundTerms:
    """Exact terms for a finite set of states with the given probabilities."""
    d = moments[0].gd.shape[0]
    x = np.array([m.flat() for m in moments])
    w = np.full(len(moments), 1.0 / len(moments)) if weights is None else np.asarray(weights)
    g_max = np.array([m.g_max for m in moments])
    d_max = np.array([m.d_max for m in moments])
    return _exact_terms(x, g_max, d_max, w, d)


def _exact_terms(x, g_max, d_max, w, d) -> BoundTerms:
    mean = w @ x
    var = w @ (x - mean) ** 2
    b1, b2, b3, b4 = _terms(_zero_floor(var), d)
    support = w > 0
    return BoundTerms(
        alpha_sup=float(g_max[support].max()),
        beta_sup=float(d_max[support].max()),
        e_d2=float(mean[0]),
        b1=float(b1), b2=float(b2), b3=float(b3), b4=float(b4),
        se={k: 0.0 for k in ("e_d2", "b1", "b2", "b3", "b4")},
        exact=True,
    )


def _jackknife(x: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    """Terms from sample standard deviations, with jackknife standard errors."""
    r = x.shape[0]
    var = x.var(axis=0, ddof=1)
    full = _terms(_zero_floor(var), d)
    s1 = x.sum(axis=0)
    s2 = (x * x).sum(axis=0)
    loo_mean = (s1[None, :] - x) / (r - 1)
    loo_var = ((s2[None, :] - x * x) - (r - 1) * loo_mean**2) / (r - 2)
    loo = _terms(_zero_floor(loo_var), d)
    se = np.sqrt((r - 1) / r * ((loo - loo.mean(axis=0)) ** 2).sum(axis=0))
    return full, se


def bound_terms(model: CouplingModel, conditioner=None, reps: int = 200, seed: int = 0) -> BoundTerms:
    """Monte Carlo estimate of the bound ingredients.

    ``reps`` conditioning states are drawn from stream ``(seed, r)``.  The
    suprema are observed maxima, so they are lower bounds on the true sups.
    """
    conditioner = conditioner if conditioner is not None else model.get_conditioner()
    if reps < 3:
        raise ValueError("need at least 3 replications for jackknife errors")
    moments = [conditioner.moments(conditioner.draw(stream(seed, r))) for r in range(reps)]
    d = moments[0].gd.shape[0]
    x = np.array([m.flat() for m in moments])
    (b1, b2, b3, b4), (s1, s2, s3, s4) = _jackknife(x, d)
    d2 = x[:, 0]
    return BoundTerms(
        alpha_sup=max(m.g_max for m in moments),
        beta_sup=max(m.d_max for m in moments),
        e_d2=float(d2.mean()),
        b1=float(b1), b2=float(b2), b3=float(b3), b4=float(b4),
        se={
            "e_d2": float(d2.std(ddof=1) / np.sqrt(reps)),
            "b1": float(s1), "b2": float(s2), "b3": float(s3), "b4": float(s4),
        },
        reps=reps,
    )


def exact_bound_terms(model: CouplingModel) -> BoundTerms:
    cond = model.get_conditioner()
    if not isinstance(cond, EnumerationConditioner):
        cond = EnumerationConditioner(model.enumeration)
    table, g_max, d_max = cond.flat_table()
    return _exact_terms(table, g_max, d_max, cond.state_prob, cond.dim)


def bound_evaluate(d: int, terms: BoundTerms, s2: float | None = None, s_inf: float | None = None) -> float:
    """Bracket of the error bound, without its universal constant.

    Identity covariance:
        d^(7/4) a E|D|^2 + d^(1/4) b + d^(7/8) sqrt(a B1) + d^(3/8) B2 + d^(1/8) sqrt(B3)
    With ``s2 = ||Sigma^-1/2||_2`` and ``s_inf = ||Sigma^-1/2||_max`` given:
        a s2^2 E|D|^2 + s2 b + s_inf sqrt(a B4) + s_inf^2 B2 + s_inf^(3/2) sqrt(B3)
    """
    a, b = terms.alpha_sup, terms.beta_sup
    if (s2 is None) != (s_inf is None):
        raise ValueError("give both s2 and s_inf, or neither")
    if s2 is None:
        return (
            d**1.75 * a * terms.e_d2
            + d**0.25 * b
            + d**0.875 * np.sqrt(a * terms.b1)
            + d**0.375 * terms.b2
            + d**0.125 * np.sqrt(terms.b3)
        )
    return (
        a * s2**2 * terms.e_d2
        + s2 * b
        + s_inf * np.sqrt(a * terms.b4)
        + s_inf**2 * terms.b2
        + s_inf**1.5 * np.sqrt(terms.b3)
    )


def inverse_root_norms(cov: np.ndarray) -> tuple[float, float]:
    """``(||Sigma^-1/2||_2, ||Sigma^-1/2||_max)`` for a positive definite ``Sigma``."""
    vals, vecs = np.linalg.eigh(cov)
    if vals.min() <= 0:
        raise ValueError("covariance must be positive definite")
    root_inv = (vecs / np.sqrt(vals)) @ vecs.T
    return float(1.0 / np.sqrt(vals.min())), float(np.abs(root_inv).max())
