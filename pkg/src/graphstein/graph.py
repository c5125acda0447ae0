"""Dense simple graphs stored as adjacency bitsets, with subgraph counting."""

from __future__ import annotations

import enum
import itertools
import math
from pathlib import Path
from typing import Iterable

import numpy as np

from . import _kernels
from .rng import as_generator

BRUTE_FORCE_MAX_N = 14


class GraphFormatError(ValueError):
    """Malformed edge-list input; ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        prefix = f"line {lineno}: " if lineno is not None else ""
        super().__init__(prefix + message)


class SubgraphPattern(enum.Enum):
    K2 = "k2"
    K3 = "k3"
    C4 = "c4"

    @property
    def vertices(self) -> int:
        return {"k2": 2, "k3": 3, "c4": 4}[self.value]

    @property
    def edges(self) -> tuple[tuple[int, int], ...]:
        return {
            "k2": ((0, 1),),
            "k3": ((0, 1), (1, 2), (0, 2)),
            "c4": ((0, 1), (1, 2), (2, 3), (0, 3)),
        }[self.value]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def automorphisms(self) -> int:
        return {"k2": 2, "k3": 6, "c4": 8}[self.value]

    @classmethod
    def parse(cls, name: str) -> "SubgraphPattern":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown pattern {name!r}; expected one of k2, k3, c4") from None


class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``rows[i]`` is the neighbourhood of ``i`` as a bitset of ``ceil(n/64)``
    64-bit words.  Instances are immutable.
    """

    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows: np.ndarray):
        if n < 1:
            raise ValueError(f"graph needs at least one vertex, got n={n}")
        words = (n + 63) // 64
        rows = np.ascontiguousarray(rows, dtype=np.uint64)
        if rows.shape != (n, words):
            raise ValueError(f"rows must have shape {(n, words)}, got {rows.shape}")
        rows.setflags(write=False)
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "rows", rows)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    @classmethod
    def from_adjacency(cls, adj) -> "Graph":
        adj = np.asarray(adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if np.any(np.diag(adj)):
            raise ValueError("self-loops are not allowed")
        if not np.array_equal(adj, adj.T):
            raise ValueError("adjacency matrix must be symmetric")
        return cls(adj.shape[0], _kernels.pack_dense(adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            adj[i, j] = adj[j, i] = True
        return cls(n, _kernels.pack_dense(adj))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, np.zeros((n, (n + 63) // 64), dtype=np.uint64))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        adj = ~np.eye(n, dtype=bool)
        return cls.from_adjacency(adj)

    @classmethod
    def cycle(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def path(cls, n: int) -> "Graph":
        return cls.from_edges(n, [(i, i + 1) for i in range(n - 1)])

    def adjacency(self) -> np.ndarray:
        return _kernels.unpack_dense(self.rows, self.n)

    def has_edge(self, i: int, j: int) -> bool:
        return bool((int(self.rows[i, j >> 6]) >> (j & 63)) & 1)

    def edges(self) -> list[tuple[int, int]]:
        iu, ju = np.nonzero(np.triu(self.adjacency(), 1))
        return list(zip(iu.tolist(), ju.tolist()))

    def degrees(self) -> np.ndarray:
        return self.adjacency().sum(axis=1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.rows, other.rows)

    def __hash__(self) -> int:
        return hash((self.n, self.rows.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, edges={count_edges(self)})"


def _check_probability(p: float) -> float:
    p = float(p)
    if math.isnan(p) or not 0.0 <= p <= 1.0:
        raise ValueError(f"edge probability must lie in [0, 1], got {p}")
    return p


def gen_gnp(n: int, p: float, seed) -> Graph:
    """Erdős–Rényi G(n, p).

    Pairs ``i < j`` are visited in row-major order and each consumes one
    uniform from the stream named by ``seed``.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    p = _check_probability(p)
    rng = as_generator(seed)
    u = rng.random(n * (n - 1) // 2)
    return Graph(n, _kernels.pack_threshold(n, u, p))


def count_edges(g: Graph) -> int:
    return int(_kernels.edge_count(g.rows))


def count_triangles(g: Graph) -> int:
    return int(_kernels.triangles(g.rows))


def count_four_cycles(g: Graph) -> int:
    """Number of 4-cycles, ``(1/2) * sum_{i<j} C(codeg(i, j), 2)``."""
    return int(_kernels.four_cycles(g.rows))


def codegree_matrix(g: Graph) -> np.ndarray:
    return _kernels.codegrees(g.rows)


_FAST_COUNTERS = {
    SubgraphPattern.K2: count_edges,
    SubgraphPattern.K3: count_triangles,
    SubgraphPattern.C4: count_four_cycles,
}


def count_pattern(g: Graph, f: SubgraphPattern) -> int:
    return _FAST_COUNTERS[f](g)


def injective_homomorphisms(g: Graph, f: SubgraphPattern) -> int:
    """Exhaustive ``|end(F, G)|``: injective maps preserving every edge of F."""
    if g.n > BRUTE_FORCE_MAX_N:
        raise ValueError(
            f"brute force enumeration limited to n <= {BRUTE_FORCE_MAX_N}, got n={g.n}"
        )
    adj = g.adjacency()
    pattern_edges = f.edges
    count = 0
    for phi in itertools.permutations(range(g.n), f.vertices):
        if all(adj[phi[a], phi[b]] for a, b in pattern_edges):
            count += 1
    return count


def brute_force_count(g: Graph, f: SubgraphPattern) -> int:
    """Copies of ``f`` in ``g`` by enumeration; the oracle for the fast counters."""
    total = injective_homomorphisms(g, f)
    assert total % f.automorphisms == 0
    return total // f.automorphisms


def falling_factorial(n: int, k: int) -> int:
    return math.perm(n, k)


def injective_density(g: Graph, f: SubgraphPattern) -> float:
    """``t(F, G) = |end(F, G)| / (n)_k``."""
    k = f.vertices
    if g.n < k:
        raise ValueError(f"graph has {g.n} vertices, pattern needs {k}")
    return count_pattern(g, f) * f.automorphisms / falling_factorial(g.n, k)


# --- edge-list text format -------------------------------------------------


def format_edge_list(g: Graph) -> str:
    edges = sorted(g.edges())
    lines = [f"{g.n} {len(edges)}"]
    lines.extend(f"{i} {j}" for i, j in edges)
    return "\n".join(lines) + "\n"


def write_edge_list(g: Graph, path) -> None:
    Path(path).write_text(format_edge_list(g))


def parse_edge_list(text: str) -> Graph:
    lines = text.splitlines()
    if not lines:
        raise GraphFormatError("empty input", 1)

    def ints(lineno: int, line: str, expected: int) -> list[int]:
        parts = line.split()
        if len(parts) != expected:
            raise GraphFormatError(f"expected {expected} integers, got {line!r}", lineno)
        try:
            return [int(x) for x in parts]
        except ValueError:
            raise GraphFormatError(f"non-integer token in {line!r}", lineno) from None

    n, m = ints(1, lines[0], 2)
    if n < 1 or m < 0:
        raise GraphFormatError(f"invalid header n={n} m={m}", 1)
    body = [(k + 2, line) for k, line in enumerate(lines[1:]) if line.strip()]
    if len(body) != m:
        raise GraphFormatError(f"header announces {m} edges, found {len(body)}", 1)
    adj = np.zeros((n, n), dtype=bool)
    for lineno, line in body:
        i, j = ints(lineno, line, 2)
        if not (0 <= i < n and 0 <= j < n):
            raise GraphFormatError(f"vertex id out of range [0, {n}) in edge {i} {j}", lineno)
        if i == j:
            raise GraphFormatError(f"self-loop at vertex {i}", lineno)
        if adj[i, j]:
            raise GraphFormatError(f"duplicate edge {i} {j}", lineno)
        adj[i, j] = adj[j, i] = True
    return Graph(n, _kernels.pack_dense(adj))


def read_edge_list(path) -> Graph:
    return parse_edge_list(Path(path).read_text())
