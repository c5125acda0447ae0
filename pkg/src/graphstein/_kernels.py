"""Compiled inner loops over bitset adjacency rows.

Rows are ``uint64`` arrays of shape ``(n, ceil(n / 64))``; bit ``j % 64`` of
word ``j // 64`` in row ``i`` is the indicator of edge ``{i, j}``.
"""

import numba as nb
import numpy as np

_M1 = np.uint64(0x5555555555555555)
_M2 = np.uint64(0x3333333333333333)
_M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
_H01 = np.uint64(0x0101010101010101)
_ONE = np.uint64(1)


@nb.njit(cache=True, nogil=True)
def _popcount(x):
    x = x - ((x >> np.uint64(1)) & _M1)
    x = (x & _M2) + ((x >> np.uint64(2)) & _M2)
    x = (x + (x >> np.uint64(4))) & _M4
    return (x * _H01) >> np.uint64(56)


@nb.njit(cache=True, nogil=True)
def pack_threshold(n, u, p):
    """Edge {i, j} present iff ``u[k] < p``, k the row-major index of i < j."""
    words = (n + 63) // 64
    rows = np.zeros((n, words), dtype=np.uint64)
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if u[k] < p:
                rows[i, j >> 6] |= _ONE << np.uint64(j & 63)
                rows[j, i >> 6] |= _ONE << np.uint64(i & 63)
            k += 1
    return rows


@nb.njit(cache=True, nogil=True)
def pack_threshold_matrix(n, u, probs):
    """As :func:`pack_threshold` with a per-pair probability ``probs[i, j]``."""
    words = (n + 63) // 64
    rows = np.zeros((n, words), dtype=np.uint64)
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            if u[k] < probs[i, j]:
                rows[i, j >> 6] |= _ONE << np.uint64(j & 63)
                rows[j, i >> 6] |= _ONE << np.uint64(i & 63)
            k += 1
    return rows


@nb.njit(cache=True, nogil=True)
def pack_dense(adj):
    n = adj.shape[0]
    words = (n + 63) // 64
    rows = np.zeros((n, words), dtype=np.uint64)
    for i in range(n):
        for j in range(n):
            if adj[i, j]:
                rows[i, j >> 6] |= _ONE << np.uint64(j & 63)
    return rows


@nb.njit(cache=True, nogil=True)
def unpack_dense(rows, n):
    adj = np.zeros((n, n), dtype=np.bool_)
    for i in range(n):
        for j in range(n):
            adj[i, j] = (rows[i, j >> 6] >> np.uint64(j & 63)) & _ONE
    return adj


@nb.njit(cache=True, nogil=True)
def edge_count(rows):
    total = 0
    for i in range(rows.shape[0]):
        for k in range(rows.shape[1]):
            total += _popcount(rows[i, k])
    return total // 2


@nb.njit(cache=True, nogil=True)
def codegrees(rows):
    """Matrix of ``|N(i) & N(j)|``; the diagonal holds the degrees."""
    n, words = rows.shape
    out = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i, n):
            c = 0
            for k in range(words):
                c += _popcount(rows[i, k] & rows[j, k])
            out[i, j] = c
            out[j, i] = c
    return out


@nb.njit(cache=True, nogil=True)
def four_cycles(rows):
    # each 4-cycle has exactly two diagonal pairs {i, j}, each with the other
    # two cycle vertices among its common neighbours
    n, words = rows.shape
    total = 0
    for i in range(n):
        for j in range(i + 1, n):
            c = 0
            for k in range(words):
                c += _popcount(rows[i, k] & rows[j, k])
            total += c * (c - 1) // 2
    return total // 2


@nb.njit(cache=True, nogil=True)
def triangles(rows):
    n, words = rows.shape
    total = 0
    for i in range(n):
        for j in range(i + 1, n):
            if (rows[i, j >> 6] >> np.uint64(j & 63)) & _ONE:
                for k in range(words):
                    total += _popcount(rows[i, k] & rows[j, k])
    return total // 3


@nb.njit(cache=True, nogil=True)
def perm_upper_rows(dense, perms):
    # out[b, i] = sum_{j > i} dense[perms[b, i], perms[b, j]]
    size, n = perms.shape
    out = np.zeros((size, n))
    for b in range(size):
        for i in range(n - 1):
            a = perms[b, i]
            s = 0.0
            for j in range(i + 1, n):
                s += dense[a, perms[b, j]]
            out[b, i] = s
    return out


@nb.njit(cache=True, nogil=True)
def inversion_counts(perms):
    size, n = perms.shape
    out = np.zeros(size, dtype=np.int64)
    for b in range(size):
        c = 0
        for i in range(n - 1):
            v = perms[b, i]
            for j in range(i + 1, n):
                if v > perms[b, j]:
                    c += 1
        out[b] = c
    return out
