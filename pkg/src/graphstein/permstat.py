"""Permutation statistics ``W = sum_{i<j} M[pi(i), pi(j)]`` for anti-symmetric M.

Permutations are numpy integer arrays in one-line notation over ``0..n-1``.
Text I/O uses the conventional 1-based notation.

Descents and inversions enter through two routes: the direct counters, and
the matrix statistic.  They are linked by

    perm_stat(descent matrix, pi)   = 2 Des(pi^-1) - (n - 1)
    perm_stat(inversion matrix, pi) = 2 Inv(pi^-1) - C(n, 2)

for the unscaled matrices, so the scaled matrix statistics at ``pi`` are the
standardized counts of ``pi^-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._kernels import inversion_counts, perm_upper_rows


def check_permutation(pi) -> np.ndarray:
    arr = np.asarray(pi)
    if arr.ndim != 1 or not np.issubdtype(arr.dtype, np.integer):
        raise ValueError("permutation must be a 1-d integer array")
    n = arr.shape[0]
    if n == 0 or not np.array_equal(np.sort(arr), np.arange(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {arr.tolist()}")
    return arr.astype(np.int64, copy=False)


def inverse(pi) -> np.ndarray:
    pi = check_permutation(pi)
    inv = np.empty_like(pi)
    inv[pi] = np.arange(pi.shape[0])
    return inv


def descents(pi) -> int:
    pi = check_permutation(pi)
    return int(np.count_nonzero(pi[:-1] > pi[1:]))


def inversions(pi) -> int:
    pi = check_permutation(pi)
    return int(np.count_nonzero(np.triu(pi[:, None] > pi[None, :], 1)))


def descents_batch(perms: np.ndarray) -> np.ndarray:
    return np.count_nonzero(perms[:, :-1] > perms[:, 1:], axis=1)


def inversions_batch(perms: np.ndarray) -> np.ndarray:
    return inversion_counts(np.ascontiguousarray(perms, dtype=np.int64))


def random_permutations(rng: np.random.Generator, n: int, size: int) -> np.ndarray:
    base = np.broadcast_to(np.arange(n, dtype=np.int64), (size, n))
    return rng.permuted(base, axis=1)


def format_permutation(pi) -> str:
    return " ".join(str(v + 1) for v in check_permutation(pi))


def parse_permutation(text: str) -> np.ndarray:
    try:
        values = [int(tok) for tok in text.split()]
    except ValueError:
        raise ValueError(f"non-integer token in permutation {text!r}") from None
    return check_permutation(np.array(values, dtype=np.int64) - 1)


@dataclass(frozen=True, eq=False)
class StatMatrix:
    """Anti-symmetric matrix stored by its strict upper triangle.

    ``upper`` lists ``M[i, j]`` for ``i < j`` in row-major order; the lower
    triangle is ``-M[j, i]`` and the diagonal is zero by construction.
    """

    n: int
    upper: np.ndarray

    def __post_init__(self):
        upper = np.array(self.upper, dtype=float).ravel()
        if upper.shape[0] != self.n * (self.n - 1) // 2:
            raise ValueError(f"expected {self.n * (self.n - 1) // 2} upper entries, got {upper.shape[0]}")
        upper.setflags(write=False)
        object.__setattr__(self, "upper", upper)

    @classmethod
    def from_dense(cls, m) -> "StatMatrix":
        m = np.asarray(m, dtype=float)
        if not np.allclose(m, -m.T, rtol=0, atol=0):
            raise ValueError("matrix is not anti-symmetric")
        return cls(m.shape[0], m[np.triu_indices(m.shape[0], 1)])

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "StatMatrix":
        return cls(n, rng.standard_normal(n * (n - 1) // 2))

    @cached_property
    def dense(self) -> np.ndarray:
        m = np.zeros((self.n, self.n))
        iu = np.triu_indices(self.n, 1)
        m[iu] = self.upper
        m[(iu[1], iu[0])] = -self.upper
        m.setflags(write=False)
        return m

    def __getitem__(self, ij) -> float:
        i, j = ij
        return float(self.dense[i, j])

    def row_upper_sums(self) -> np.ndarray:
        """``A_i = sum_{j > i} M[i, j]``."""
        return np.triu(self.dense, 1).sum(axis=1)

    def col_upper_sums(self) -> np.ndarray:
        """``B_i = sum_{j < i} M[j, i]``."""
        return np.triu(self.dense, 1).sum(axis=0)

    def beta(self) -> float:
        """``max_i sum_j |M[i, j]|``."""
        return float(np.abs(self.dense).sum(axis=1).max())


def _check_sizes(m: StatMatrix, n: int) -> None:
    if m.n != n:
        raise ValueError(f"matrix has size {m.n}, permutation has size {n}")


def perm_stat(m: StatMatrix, pi) -> float:
    pi = check_permutation(pi)
    _check_sizes(m, pi.shape[0])
    sub = m.dense[np.ix_(pi, pi)]
    return float(np.triu(sub, 1).sum())


def perm_stat_batch(m: StatMatrix, perms: np.ndarray) -> np.ndarray:
    return upper_row_sums_batch(m, perms).sum(axis=1)


def upper_row_sums_batch(m: StatMatrix, perms: np.ndarray) -> np.ndarray:
    """``sum_{j > i} M[pi(i), pi(j)]`` for every row of ``perms``, shape ``(size, n)``."""
    _check_sizes(m, perms.shape[1])
    return perm_upper_rows(np.ascontiguousarray(m.dense), np.ascontiguousarray(perms, dtype=np.int64))


def cov_lemma2(mr: StatMatrix, ms: StatMatrix) -> float:
    """Covariance of the two statistics under a uniform permutation.

    ``(1/3) (sum_{i<j} Mr_ij Ms_ij + sum_i (Ar_i - Br_i)(As_i - Bs_i))``.
    """
    if mr.n != ms.n:
        raise ValueError(f"matrix sizes differ: {mr.n} vs {ms.n}")
    cr = mr.row_upper_sums() - mr.col_upper_sums()
    cs = ms.row_upper_sums() - ms.col_upper_sums()
    return (math.fsum(mr.upper * ms.upper) + math.fsum(cr * cs)) / 3.0


def builtin_matrices(n: int, kind: str, scaled: bool = True) -> StatMatrix:
    """Descent or inversion weight matrix.

    Unscaled entries are -1 above the diagonal (only on the first
    superdiagonal for ``descent``).  Scaling by ``sqrt(3/(n+1))`` resp.
    ``sqrt(18/(n(n-1)(2n+5)))`` gives unit variance.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    iu, ju = np.triu_indices(n, 1)
    if kind == "descent":
        upper = np.where(ju == iu + 1, -1.0, 0.0)
        factor = math.sqrt(3.0 / (n + 1))
    elif kind == "inversion":
        upper = np.full(iu.shape[0], -1.0)
        factor = math.sqrt(18.0 / (n * (n - 1) * (2 * n + 5)))
    else:
        raise ValueError(f"kind must be 'descent' or 'inversion', got {kind!r}")
    return StatMatrix(n, upper * factor if scaled else upper)


def fulman_step(pi, i: int) -> np.ndarray:
    """``pi o (i, i+1, ..., n-1)``: drop position ``i`` and re-append its value.

    ``i`` is a 0-based position; ``i = n - 1`` returns ``pi`` unchanged.
    """
    pi = check_permutation(pi)
    n = pi.shape[0]
    if not 0 <= i < n:
        raise IndexError(f"position {i} out of range for n={n}")
    return np.concatenate([pi[:i], pi[i + 1 :], pi[i : i + 1]])


def fulman_increments(mats: list[StatMatrix], pi) -> np.ndarray:
    """``W(fulman_step(pi, i)) - W(pi)`` for every ``i``, shape ``(n, d)``.

    Moving the value at position ``i`` to the end flips the order of that
    value against every later one, so the increment is
    ``-2 sum_{j > i} M[pi(i), pi(j)]``.
    """
    pi = check_permutation(pi)
    out = np.empty((pi.shape[0], len(mats)))
    for r, m in enumerate(mats):
        sub = m.dense[np.ix_(pi, pi)]
        out[:, r] = -2.0 * np.triu(sub, 1).sum(axis=1)
    return out


def standardized_descent_inversion(pi) -> tuple[float, float]:
    pi = check_permutation(pi)
    n = pi.shape[0]
    if n < 2:
        raise ValueError("need n >= 2")
    w1 = (descents(pi) - (n - 1) / 2) / math.sqrt((n + 1) / 12)
    w2 = (inversions(pi) - math.comb(n, 2) / 2) / math.sqrt(n * (n - 1) * (2 * n + 5) / 72)
    return w1, w2


def standardized_batch(perms: np.ndarray) -> np.ndarray:
    n = perms.shape[1]
    w1 = (descents_batch(perms) - (n - 1) / 2) / math.sqrt((n + 1) / 12)
    w2 = (inversions_batch(perms) - math.comb(n, 2) / 2) / math.sqrt(n * (n - 1) * (2 * n + 5) / 72)
    return np.column_stack([w1, w2])
