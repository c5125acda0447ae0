"""Local-dependence coupling for the standardized edge / 4-cycle vector.

Summands are indexed by 4-sets ``iota`` of vertices:

    Y_iota = (X1_iota / (C(n-2,2) sigma1), X2_iota / sigma2)

so that ``W = sum Y_iota`` is exactly the standardized pair.  Two 4-sets
sharing at most one vertex use disjoint edges, hence the neighbourhood of
``iota`` is every 4-set meeting it in two or more vertices.  ``W' = W - R_I``
with ``R_iota`` the neighbourhood sum, and ``G = -C(n,4) Y_I``.

Neighbourhood sums are evaluated by inclusion-exclusion: adding the sums over
4-sets through each of the six pairs of ``iota`` counts a 4-set meeting
``iota`` in ``m`` vertices ``C(m, 2)`` times, so

    R_iota = sum_pairs P - 2 sum_triples T + 3 Y_iota

where ``P`` and ``T`` are sums over 4-sets containing a given pair / triple.
Those have closed forms in degrees, codegrees and ``A^3``.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from ..graph import Graph
from ..homogeneity import four_subsets, quad_terms, sigma1_sq, sigma2_sq
from ..rng import as_generator
from .bounds import ConditionalMoments
from .core import CouplingModel, CouplingSample, from_local_dependence

ENUMERATION_MAX_N = 6

_PAIRS = list(itertools.combinations(range(4), 2))
_TRIPLES = list(itertools.combinations(range(4), 3))


def _scales(n: int, p: float) -> tuple[float, float]:
    return math.comb(n - 2, 2) * math.sqrt(sigma1_sq(n, p)), math.sqrt(sigma2_sq(n, p))


def _pair_sums(adj: np.ndarray, deg, cod, a3, n: int):
    """Sums of edge count and 4-cycle count over 4-sets containing ``{u, v}``."""
    m = deg.sum() / 2
    n2 = math.comb(n - 2, 2)
    du, dv = deg[:, None], deg[None, :]
    s1 = adj * n2 + (n - 3) * (du + dv - 2 * adj) + (m - du - dv + adj)
    c4 = cod * (cod - 1) / 2 + adj * (a3 - du - dv + 1)
    return s1, c4


def _triple_sums(adj: np.ndarray, deg, cod, n: int):
    """Sums over 4-sets containing ``{u, v, w}``, as dense ``n^3`` arrays."""
    auv = adj[:, :, None]
    auw = adj[:, None, :]
    avw = adj[None, :, :]
    e = auv + auw + avw
    s1 = (n - 5) * e + deg[:, None, None] + deg[None, :, None] + deg[None, None, :]
    c4 = (
        auv * auw * (cod[None, :, :] - 1)
        + auv * avw * (cod[:, None, :] - 1)
        + auw * avw * (cod[:, :, None] - 1)
    )
    return s1, c4


def neighbourhood_size(n: int) -> int:
    return 1 + 4 * (n - 4) + 6 * math.comb(n - 4, 2)


def summands(adj: np.ndarray, p: float) -> tuple[np.ndarray, np.ndarray]:
    """``Y_iota`` and ``R_iota`` for every 4-set, each of shape ``(C(n,4), 2)``."""
    n = adj.shape[0]
    adj = adj.astype(float)
    quads = four_subsets(n)
    c1, c2 = _scales(n, p)
    x1, x2 = quad_terms(adj, quads, p)
    s1_own = x1 + 6 * p
    c4_own = x2 + 2 * p**3 * s1_own - 9 * p**4

    deg = adj.sum(axis=1)
    cod = adj @ adj
    a3 = cod @ adj
    ps1, pc4 = _pair_sums(adj, deg, cod, a3, n)
    ts1, tc4 = _triple_sums(adj, deg, cod, n)

    q = [quads[:, k] for k in range(4)]
    s1_nb = 3 * s1_own
    c4_nb = 3 * c4_own
    for a, b in _PAIRS:
        s1_nb = s1_nb + ps1[q[a], q[b]]
        c4_nb = c4_nb + pc4[q[a], q[b]]
    for a, b, c in _TRIPLES:
        s1_nb = s1_nb - 2 * ts1[q[a], q[b], q[c]]
        c4_nb = c4_nb - 2 * tc4[q[a], q[b], q[c]]

    size = neighbourhood_size(n)
    r1 = (s1_nb - 6 * p * size) / c1
    r2 = (c4_nb - 2 * p**3 * s1_nb + 9 * p**4 * size) / c2
    y = np.column_stack([x1 / c1, x2 / c2])
    return y, np.column_stack([r1, r2])


class GraphConditioner:
    """Conditions on the whole graph; the uniform 4-set is averaged exactly."""

    dim = 2

    def __init__(self, n: int, p: float):
        self.n = n
        self.p = p

    def draw(self, rng):
        from ..graph import gen_gnp

        return gen_gnp(self.n, self.p, rng).adjacency()

    def moments(self, adj) -> ConditionalMoments:
        y, r = summands(adj, self.p)
        big_n = y.shape[0]
        gd = y.T @ r
        dd = r.T @ r / big_n
        rr = np.stack([r[:, 0] * r[:, 0], r[:, 0] * r[:, 1], r[:, 1] * r[:, 1]], axis=1)
        m = -(y.T @ rr)
        gdd = np.stack([m[:, [0, 1]], m[:, [1, 2]]], axis=1)
        return ConditionalMoments(
            gd,
            dd,
            gdd,
            g_max=float(big_n * np.linalg.norm(y, axis=1).max()),
            d_max=float(np.linalg.norm(r, axis=1).max()),
        )


def _all_adjacencies(n: int):
    iu = np.triu_indices(n, 1)
    m = len(iu[0])
    codes = np.arange(2**m)
    bits = ((codes[:, None] >> np.arange(m)) & 1).astype(float)
    adj = np.zeros((2**m, n, n))
    adj[:, iu[0], iu[1]] = bits
    adj[:, iu[1], iu[0]] = bits
    return adj, bits.sum(axis=1), m


def graph_neighbourhoods(n: int) -> list[list[int]]:
    quads = four_subsets(n)
    member = np.zeros((len(quads), n), dtype=np.int8)
    member[np.arange(len(quads))[:, None], quads] = 1
    overlap = member.astype(np.int32) @ member.T
    return [np.nonzero(row >= 2)[0].tolist() for row in overlap]


def graph_coupling(n: int, p: float) -> CouplingModel:
    """Coupling for ``W = (W1, W2)`` under G(n, p).

    For ``n <= 6`` the model is enumerable (all graphs x all 4-sets), built
    through the generic local-dependence constructor.
    """
    if n < 5:
        raise ValueError(f"graph coupling needs n >= 5, got {n}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    c1, c2 = _scales(n, p)
    quads = four_subsets(n)

    def sample_x(rng):
        from ..graph import gen_gnp

        adj = gen_gnp(n, p, rng).adjacency().astype(float)
        x1, x2 = quad_terms(adj, quads, p)
        return np.column_stack([x1 / c1, x2 / c2])

    enumeration = None
    if n <= ENUMERATION_MAX_N:
        adj, edges, m = _all_adjacencies(n)
        probs = p**edges * (1 - p) ** (m - edges)
        x1, x2 = quad_terms(adj, quads, p)
        x = np.stack([x1 / c1, x2 / c2], axis=-1)
        enumeration = (probs, x)
        base = from_local_dependence(
            graph_neighbourhoods(n), enumeration=enumeration, sample_x=sample_x,
            name=f"graph coupling n={n} p={p}",
        )
        enumerator = base.enumerator
    else:
        enumerator = None

    def sampler(rng, size):
        rows = []
        for _ in range(size):
            from ..graph import gen_gnp

            adj = gen_gnp(n, p, rng).adjacency()
            y, r = summands(adj, p)
            i = rng.integers(y.shape[0])
            w = y.sum(axis=0)
            rows.append((w, w - r[i], -y.shape[0] * y[i]))
        return CouplingSample(*(np.array([row[k] for row in rows]) for k in range(3)))

    return CouplingModel(
        2,
        f"graph coupling n={n} p={p}",
        sampler,
        enumerator,
        GraphConditioner(n, p),
        info={"n": n, "p": p},
    )


def graph_coupling_row(g: Graph, p: float, rng=None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One ``(W, W', G)`` draw for a fixed graph and a random 4-set."""
    rng = as_generator(0 if rng is None else rng)
    y, r = summands(g.adjacency(), p)
    i = rng.integers(y.shape[0])
    w = y.sum(axis=0)
    return w, w - r[i], -y.shape[0] * y[i]
