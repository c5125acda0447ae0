"""Edge / corrected 4-cycle statistics and the chi-square homogeneity test.

For a graph on ``n`` vertices with ``T1`` edges and ``T2`` four-cycles the two
statistics at edge probability ``p`` are

    W1 = (T1 - C(n,2) p) / sigma1
    W2 = (T2 - 2 C(n-2,2) p^3 T1 + 9 C(n,4) p^4) / sigma2

which are centred with identity covariance under G(n, p).  The confidence set
collects every ``p`` with ``W1^2 + W2^2 <= -2 log(alpha)``; an empty set
rejects homogeneity.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graph import Graph, count_edges, count_four_cycles

BISECT_TOL = 1e-8


class DegenerateVarianceError(ValueError):
    """Raised for p in {0, 1}, where both statistics have zero variance."""


class InternalConsistencyError(ArithmeticError):
    pass


def _check_p(p: float) -> float:
    p = float(p)
    if math.isnan(p) or not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    return p


def sigma1_sq(n: int, p: float) -> float:
    p = _check_p(p)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return math.comb(n, 2) * p * (1.0 - p)


def sigma2_sq_forms(n: int, p: float) -> tuple[float, float]:
    """Both closed forms of the variance of the corrected 4-cycle numerator.

    Integer prefactors are exact Python integers; ``(1 - p)`` is factored
    out of the polynomial parts so neither form cancels near ``p = 1``.
    """
    p = _check_p(p)
    if n < 5:
        raise ValueError(f"the 4-cycle statistic needs n >= 5, got {n}")
    q = 1.0 - p
    c4 = math.comb(n, 4)
    ff4 = math.perm(n, 4)
    p2, p4 = p * p, p**4
    p6 = p4 * p2
    # 1 - 4p^3 + 3p^4 = (1-p)^2 (1 + 2p + 3p^2),   1 - 2p + p^2 = (1-p)^2
    first = 3 * c4 * math.fsum(
        [p4 * q * q * (1.0 + 2.0 * p + 3.0 * p2), (4 * (n - 4) + 2) * p6 * q * q]
    )
    # p^6 + p^8 - 2p^7 = p^6 (1-p)^2,   p^4 + p^8 - 2p^6 = p^4 (1-p^2)^2
    one_m_p2 = q * (1.0 + p)
    second = math.fsum([ff4 * (n - 3) * p6 * q * q / 2.0, ff4 * p4 * one_m_p2 * one_m_p2 / 8.0])
    return first, second


def sigma2_sq(n: int, p: float) -> float:
    first, second = sigma2_sq_forms(n, p)
    scale = max(abs(first), abs(second))
    if scale > 0 and abs(first - second) > 1e-9 * scale:
        raise InternalConsistencyError(
            f"sigma2^2 closed forms disagree at n={n}, p={p}: {first!r} vs {second!r}"
        )
    return second


def _sigma_vec(n: int, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q = 1.0 - p
    p4 = p**4
    ff4 = float(math.perm(n, 4))
    s1 = math.comb(n, 2) * p * q
    one_m_p2 = q * (1.0 + p)
    s2 = ff4 * (n - 3) * p4 * p * p * q * q / 2.0 + ff4 * p4 * one_m_p2 * one_m_p2 / 8.0
    return s1, s2


@dataclass(frozen=True)
class TestStatistics:
    __test__ = False  # keep pytest from collecting this

    w1: float
    w2: float
    t1: int
    t2: int
    p: float
    n: int
    sigma1_sq: float
    sigma2_sq: float


def w2_numerator(n: int, t1, t2, p):
    return t2 - 2 * math.comb(n - 2, 2) * p**3 * t1 + 9 * math.comb(n, 4) * p**4


def w_from_counts(n: int, t1, t2, p):
    """(W1, W2) from edge and 4-cycle counts; vectorised over ``p``."""
    p = np.asarray(p, dtype=float)
    s1, s2 = _sigma_vec(n, p)
    w1 = (t1 - math.comb(n, 2) * p) / np.sqrt(s1)
    w2 = w2_numerator(n, t1, t2, p) / np.sqrt(s2)
    return w1, w2


def w_stats(g: Graph, p: float) -> TestStatistics:
    p = _check_p(p)
    if p in (0.0, 1.0):
        raise DegenerateVarianceError(f"statistics are undefined at p={p}")
    n = g.n
    if n < 5:
        raise ValueError(f"the 4-cycle statistic needs n >= 5, got {n}")
    t1 = count_edges(g)
    t2 = count_four_cycles(g)
    s1 = sigma1_sq(n, p)
    s2 = sigma2_sq(n, p)
    w1 = (t1 - math.comb(n, 2) * p) / math.sqrt(s1)
    w2 = w2_numerator(n, t1, t2, p) / math.sqrt(s2)
    return TestStatistics(w1, w2, t1, t2, p, n, s1, s2)


def chi2_quantile(alpha: float) -> float:
    """Upper-``alpha`` point of chi-square with 2 degrees of freedom."""
    alpha = float(alpha)
    if not 0.0 < alpha <= 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    return abs(-2.0 * math.log(alpha))


@dataclass(frozen=True)
class ConfidenceSet:
    n: int
    alpha: float
    q: float
    p_lo: float
    p_hi: float
    grid_step: float
    intervals: tuple[tuple[float, float], ...]
    statistic_min: float
    argmin_p: float

    @property
    def empty(self) -> bool:
        return not self.intervals

    def contains(self, p: float) -> bool:
        return any(a <= p <= b for a, b in self.intervals)

    def report(self) -> dict:
        return {
            "n": self.n,
            "alpha": self.alpha,
            "p_domain": [self.p_lo, self.p_hi],
            "grid_step": self.grid_step,
            "intervals": [list(iv) for iv in self.intervals],
            "statistic_min": self.statistic_min,
            "argmin_p": self.argmin_p,
            "reject": self.empty,
        }


def p_grid(p_lo: float, p_hi: float, grid_step: float) -> np.ndarray:
    steps = int(round((p_hi - p_lo) / grid_step))
    return np.linspace(p_lo, p_hi, steps + 1)


def chi2_statistic(n: int, t1, t2, p):
    w1, w2 = w_from_counts(n, t1, t2, p)
    return w1 * w1 + w2 * w2


def _bisect_boundary(n, t1, t2, q, inside: float, outside: float) -> float:
    while abs(outside - inside) > BISECT_TOL:
        mid = 0.5 * (inside + outside)
        if chi2_statistic(n, t1, t2, mid) <= q:
            inside = mid
        else:
            outside = mid
    return inside


def confidence_set_from_counts(
    n: int,
    t1: int,
    t2: int,
    alpha: float,
    p_lo: float = 0.01,
    p_hi: float = 0.99,
    grid_step: float = 1e-3,
) -> ConfidenceSet:
    if not 0.0 < p_lo < p_hi < 1.0:
        raise ValueError(f"need 0 < p_lo < p_hi < 1, got [{p_lo}, {p_hi}]")
    if grid_step <= 0:
        raise ValueError("grid_step must be positive")
    if n < 5:
        raise ValueError(f"the 4-cycle statistic needs n >= 5, got {n}")
    q = chi2_quantile(alpha)
    grid = p_grid(p_lo, p_hi, grid_step)
    s = chi2_statistic(n, t1, t2, grid)
    best = int(np.argmin(s))
    inside = s <= q

    intervals = []
    k = 0
    m = len(grid)
    while k < m:
        if not inside[k]:
            k += 1
            continue
        start = k
        while k + 1 < m and inside[k + 1]:
            k += 1
        stop = k
        a = grid[start] if start == 0 else _bisect_boundary(n, t1, t2, q, grid[start], grid[start - 1])
        b = grid[stop] if stop == m - 1 else _bisect_boundary(n, t1, t2, q, grid[stop], grid[stop + 1])
        intervals.append((float(a), float(b)))
        k += 1

    return ConfidenceSet(
        n=n,
        alpha=float(alpha),
        q=q,
        p_lo=float(p_lo),
        p_hi=float(p_hi),
        grid_step=float(grid_step),
        intervals=tuple(intervals),
        statistic_min=float(s[best]),
        argmin_p=float(grid[best]),
    )


def confidence_set(g: Graph, alpha: float, p_lo=0.01, p_hi=0.99, grid_step=1e-3) -> ConfidenceSet:
    """``{p : W1^2 + W2^2 <= q_(1-alpha)}`` on a grid over ``[p_lo, p_hi]``.

    Sublevel runs found on the grid have their inner boundaries refined by
    bisection to 1e-8.  An interval narrower than the grid step can be missed.
    """
    return confidence_set_from_counts(
        g.n, count_edges(g), count_four_cycles(g), alpha, p_lo, p_hi, grid_step
    )


@dataclass(frozen=True)
class Decision:
    reject: bool
    inf_stat: float
    argmin_p: float


def homogeneity_test(g: Graph, alpha: float, p_lo=0.01, p_hi=0.99, grid_step=1e-3) -> Decision:
    cs = confidence_set(g, alpha, p_lo, p_hi, grid_step)
    return Decision(cs.empty, cs.statistic_min, cs.argmin_p)


# --- local decomposition into 4-vertex summands -------------------------------


@lru_cache(maxsize=8)
def four_subsets(n: int) -> np.ndarray:
    """All ``i < j < k < l`` as an ``(C(n,4), 4)`` array in lexicographic order."""
    count = math.comb(n, 4)
    flat = np.fromiter(
        itertools.chain.from_iterable(itertools.combinations(range(n), 4)),
        dtype=np.int32,
        count=4 * count,
    )
    out = flat.reshape(count, 4)
    out.setflags(write=False)
    return out


def _cycle_eta(adj, a, b, c, d, p):
    cyc = [adj[..., a, b], adj[..., b, c], adj[..., c, d], adj[..., d, a]]
    return cyc[0] * cyc[1] * cyc[2] * cyc[3] - p**3 * (cyc[0] + cyc[1] + cyc[2] + cyc[3]) + 3 * p**4


def _check_quad(quad) -> tuple[int, int, int, int]:
    i, j, k, l = (int(v) for v in quad)
    if not i < j < k < l:
        raise ValueError(f"tuple must satisfy i < j < k < l, got {tuple(quad)}")
    return i, j, k, l


def eta_value(g: Graph, quad, p: float) -> float:
    """``I_ij I_jk I_kl I_il - p^3 (I_ij + I_jk + I_kl + I_il) + 3 p^4``."""
    i, j, k, l = _check_quad(quad)
    if l >= g.n:
        raise ValueError(f"vertex {l} out of range for n={g.n}")
    adj = g.adjacency().astype(float)
    return float(_cycle_eta(adj, i, j, k, l, p))


def quad_terms(adj: np.ndarray, quads: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray]:
    """(X1, X2) for every row of ``quads``; ``adj`` may carry a leading batch axis."""
    i, j, k, l = quads.T
    e = lambda a, b: adj[..., a, b]
    ij, ik, il, jk, jl, kl = e(i, j), e(i, k), e(i, l), e(j, k), e(j, l), e(k, l)
    pairs = ij + ik + il + jk + jl + kl
    x1 = pairs - 6 * p
    cycles = ij * jk * kl * il + ij * jl * kl * ik + ik * jk * jl * il
    # each pair lies on exactly two of the three 4-cycles through {i,j,k,l}
    x2 = cycles - 2 * p**3 * pairs + 9 * p**4
    return x1, x2


@dataclass(frozen=True)
class Decomposition:
    n: int
    quads: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    sigma1: float
    sigma2: float

    def reconstruct(self) -> tuple[float, float]:
        """(W1, W2) rebuilt from the 4-vertex summands."""
        w1 = math.fsum(self.x1) / (math.comb(self.n - 2, 2) * self.sigma1)
        w2 = math.fsum(self.x2) / self.sigma2
        return w1, w2


def decomposition_components(g: Graph, p: float) -> Decomposition:
    p = _check_p(p)
    if p in (0.0, 1.0):
        raise DegenerateVarianceError(f"statistics are undefined at p={p}")
    n = g.n
    quads = four_subsets(n)
    x1, x2 = quad_terms(g.adjacency().astype(float), quads, p)
    return Decomposition(n, quads, x1, x2, math.sqrt(sigma1_sq(n, p)), math.sqrt(sigma2_sq(n, p)))
