"""Step-function graphons, W-random graph sampling and kernel subgraph densities."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .graph import Graph, SubgraphPattern
from .rng import as_generator


class GraphonKernel:
    """Symmetric kernel on [0, 1]^2 that is constant on product blocks.

    Subclasses expose ``block_measures`` (block widths, summing to one) and
    ``block_values`` (symmetric k x k matrix with entries in [0, 1]).
    """

    block_measures: np.ndarray
    block_values: np.ndarray

    def block_of(self, x) -> np.ndarray:
        edges = np.cumsum(self.block_measures)[:-1]
        return np.searchsorted(edges, np.asarray(x, dtype=float), side="right")

    def __call__(self, x, y):
        return self.block_values[self.block_of(x), self.block_of(y)]


def _validate_values(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float)
    if values.ndim != 2 or values.shape[0] != values.shape[1]:
        raise ValueError("kernel values must form a square matrix")
    if not np.all(np.isfinite(values)) or values.min() < 0 or values.max() > 1:
        raise ValueError("kernel values must lie in [0, 1]")
    if not np.array_equal(values, values.T):
        raise ValueError("kernel values must be symmetric")
    values.setflags(write=False)
    return values


@dataclass(frozen=True, eq=False)
class Constant(GraphonKernel):
    p: float

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"constant kernel value must lie in [0, 1], got {self.p}")

    @property
    def block_measures(self):
        return np.ones(1)

    @property
    def block_values(self):
        return np.full((1, 1), float(self.p))


@dataclass(frozen=True, eq=False)
class BlockStep(GraphonKernel):
    """Kernel equal to ``values[a, b]`` on ``[t_a, t_{a+1}) x [t_b, t_{b+1})``.

    ``breakpoints`` are the interior cut points ``0 < t_1 < ... < t_{k-1} < 1``.
    """

    values: np.ndarray
    breakpoints: tuple[float, ...] = ()

    def __post_init__(self):
        values = _validate_values(self.values)
        object.__setattr__(self, "values", values)
        k = values.shape[0]
        bp = tuple(float(t) for t in self.breakpoints)
        if not bp and k > 1:
            bp = tuple(np.arange(1, k) / k)
        if len(bp) != k - 1:
            raise ValueError(f"{k} blocks need {k - 1} breakpoints, got {len(bp)}")
        cuts = np.array((0.0,) + bp + (1.0,))
        if np.any(np.diff(cuts) <= 0):
            raise ValueError("breakpoints must be strictly increasing inside (0, 1)")
        object.__setattr__(self, "breakpoints", bp)

    @property
    def block_measures(self):
        return np.diff(np.array((0.0,) + self.breakpoints + (1.0,)))

    @property
    def block_values(self):
        return self.values


@dataclass(frozen=True, eq=False)
class Tabulated(GraphonKernel):
    """Kernel tabulated at the midpoints of a uniform m x m grid.

    Sampling treats each cell as constant, and densities use the midpoint rule
    on the same cells; accuracy is governed by the grid resolution.
    """

    grid: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "grid", _validate_values(self.grid))

    @classmethod
    def from_function(cls, f: Callable, m: int) -> "Tabulated":
        mid = (np.arange(m) + 0.5) / m
        vals = f(mid[:, None], mid[None, :])
        vals = np.broadcast_to(np.asarray(vals, dtype=float), (m, m))
        vals = 0.5 * (vals + vals.T)
        return cls(np.clip(vals, 0.0, 1.0))

    @property
    def block_measures(self):
        m = self.grid.shape[0]
        return np.full(m, 1.0 / m)

    @property
    def block_values(self):
        return self.grid


def gen_graphon(n: int, kernel: GraphonKernel, seed) -> Graph:
    """W-random graph G(n, kappa).

    Vertex types ``U_i`` are drawn first (n uniforms), then one uniform per
    pair ``i < j`` in row-major order; the pair is joined when its uniform is
    below ``kappa(U_i, U_j)``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    rng = as_generator(seed)
    types = rng.random(n)
    u = rng.random(n * (n - 1) // 2)
    blocks = kernel.block_of(types)
    probs = np.ascontiguousarray(kernel.block_values[blocks[:, None], blocks[None, :]])
    return Graph(n, _kernels.pack_threshold_matrix(n, u, probs))


def kernel_density(f: SubgraphPattern, kernel: GraphonKernel) -> float:
    """``t(F, kappa)`` for a step kernel.

    With ``B = D^(1/2) K D^(1/2)`` (``D`` the block measures), the edge,
    triangle and 4-cycle densities are ``1' D K D 1``, ``tr B^3``, ``tr B^4``.
    """
    mu = kernel.block_measures
    k = kernel.block_values
    if f is SubgraphPattern.K2:
        return float(mu @ k @ mu)
    root = np.sqrt(mu)
    b = root[:, None] * k * root[None, :]
    b2 = b @ b
    if f is SubgraphPattern.K3:
        return float(np.einsum("ij,ji->", b2, b))
    if f is SubgraphPattern.C4:
        return float(np.einsum("ij,ji->", b2, b2))
    raise ValueError(f"unsupported pattern {f}")
