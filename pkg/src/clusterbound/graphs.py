"""Labeled graphs on {1..n} as edge bitmasks, and their classification.

Edge ``{i, j}`` (1-based, i < j) occupies bit ``edge_index(n, i, j)``; bits
are ordered lexicographically, (1,2), (1,3), ..., (1,n), (2,3), ...
Enumeration streams masks in ascending order, classifying them in chunks
with the kernels in :mod:`clusterbound.kernels`.
"""
import functools
import math
from dataclasses import dataclass

import numpy as np

from . import kernels

MAX_VERTICES = 8
_CHUNK = 1 << 16


def n_edges(n):
    return n * (n - 1) // 2


def edge_index(n, i, j):
    """Bit position of edge {i, j} (1-based labels)."""
    if i > j:
        i, j = j, i
    if not 1 <= i < j <= n:
        raise ValueError(f"invalid edge ({i}, {j}) for n={n}")
    i, j = i - 1, j - 1
    return i * n - i * (i + 1) // 2 + (j - i - 1)


@dataclass(frozen=True, order=True)
class LabeledGraph:
    n: int
    mask: int

    def __post_init__(self):
        if not 1 <= self.n <= MAX_VERTICES:
            raise ValueError(f"n must be in 1..{MAX_VERTICES}")
        if not 0 <= self.mask < (1 << n_edges(self.n)):
            raise ValueError("edge mask out of range")

    @classmethod
    def from_edges(cls, n, edges):
        mask = 0
        for i, j in edges:
            if i == j:
                raise ValueError("self-loops are not allowed")
            mask |= 1 << edge_index(n, i, j)
        return cls(n, mask)

    @property
    def edges(self):
        pi, pj = kernels.edge_pairs(self.n)
        return [(int(i) + 1, int(j) + 1) for e, (i, j) in enumerate(zip(pi, pj))
                if self.mask >> e & 1]

    @property
    def n_edges(self):
        return self.mask.bit_count()

    def adjacency(self):
        adj = {v: set() for v in range(1, self.n + 1)}
        for i, j in self.edges:
            adj[i].add(j)
            adj[j].add(i)
        return adj


def _dfs_component(adj, start, removed=None):
    seen = {start}
    stack = [start]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w != removed and w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def is_connected(g):
    adj = g.adjacency()
    return len(_dfs_component(adj, 1)) == g.n


def is_biconnected(g):
    """Connected, and still connected after deleting any single vertex.

    The single edge on two vertices counts as 2-connected.
    """
    if not is_connected(g):
        return False
    if g.n <= 2:
        return g.n == 2
    adj = g.adjacency()
    for v in range(1, g.n + 1):
        start = 1 if v != 1 else 2
        if len(_dfs_component(adj, start, removed=v)) != g.n - 1:
            return False
    return True


def _check_n(n):
    if not 2 <= n <= MAX_VERTICES:
        raise ValueError(f"n must be in 2..{MAX_VERTICES}, got {n}")


def _masks_with_flag(n, flag, backend):
    total = 1 << n_edges(n)
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        flags = kernels.graph_flags(n, start, stop, backend)
        yield from (start + np.flatnonzero(flags & flag)).tolist()


def enumerate_connected(n, backend=None):
    """Every connected labeled graph on {1..n}, ascending mask order."""
    _check_n(n)
    for mask in _masks_with_flag(n, kernels.CONNECTED, backend):
        yield LabeledGraph(n, mask)


def enumerate_biconnected(n, backend=None):
    """Every 2-connected labeled graph on {1..n}, ascending mask order."""
    _check_n(n)
    for mask in _masks_with_flag(n, kernels.BICONNECTED, backend):
        yield LabeledGraph(n, mask)


def count_graphs(n, cls="connected", backend=None):
    """Number of connected or biconnected labeled graphs on n vertices."""
    _check_n(n)
    flag = {"connected": kernels.CONNECTED, "biconnected": kernels.BICONNECTED}[cls]
    total = 1 << n_edges(n)
    count = 0
    for start in range(0, total, _CHUNK):
        flags = kernels.graph_flags(n, start, min(start + _CHUNK, total), backend)
        count += int(np.count_nonzero(flags & flag))
    return count


@functools.lru_cache(maxsize=None)
def connected_masks(n):
    if n == 1:
        return np.array([0], dtype=np.int64)
    return np.fromiter(_masks_with_flag(n, kernels.CONNECTED, None), dtype=np.int64)


@functools.lru_cache(maxsize=None)
def biconnected_masks(n):
    return np.fromiter(_masks_with_flag(n, kernels.BICONNECTED, None), dtype=np.int64)


def tree_count(n):
    """Cayley's n^(n-2) labeled trees on n vertices (1 for n = 1)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1 if n == 1 else n ** (n - 2)


def spanning_trees(n):
    """Spanning trees of K_n, found by brute force (connected with n-1 edges)."""
    _check_n(n)
    return [g for g in enumerate_connected(n) if g.n_edges == n - 1]


# ----------------------------------------------------------- truncated functions


@functools.lru_cache(maxsize=None)
def phi_t_table(n):
    """phi^T for every incompatibility edge mask on n polymers.

    Entry ``A`` is the sum over connected spanning subgraphs g of A of
    (-1)^|E(g)|, computed with a subset-sum transform over the edge cube.
    Feasible up to n = 7 (2^21 entries).
    """
    if n == 1:
        return np.array([1.0])
    if n > 7:
        raise ValueError("phi^T tables are limited to n <= 7")
    E = n_edges(n)
    flags = kernels.graph_flags(n, 0, 1 << E)
    masks = np.arange(1 << E, dtype=np.int64)
    sign = np.where(np.bitwise_count(masks) % 2 == 0, 1.0, -1.0)
    cube = np.where(flags & kernels.CONNECTED, sign, 0.0).reshape((2,) * E)
    for axis in range(E):
        cube = np.cumsum(cube, axis=axis)
    return cube.reshape(-1)


def incompatibility_mask(matrix):
    """Edge mask of the upper triangle of a boolean incompatibility matrix."""
    m = np.asarray(matrix, dtype=bool)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("incompatibility matrix must be square")
    if not np.array_equal(m, m.T):
        raise ValueError("incompatibility matrix must be symmetric")
    if not m.diagonal().all():
        raise ValueError("a polymer is always incompatible with itself")
    mask = 0
    for i in range(n):
        for j in range(i + 1, n):
            if m[i, j]:
                mask |= 1 << edge_index(n, i + 1, j + 1)
    return mask


def penrose_value(incompatibility, backend=None):
    """phi^T: signed count of connected graphs using only incompatible pairs.

    Brute force over every subgraph of the incompatibility graph, each
    connected spanning one contributing (-1)^|E(g)|. On the complete
    incompatibility graph this equals (-1)^(n-1) (n-1)!.
    """
    allowed = incompatibility_mask(incompatibility)
    n = len(incompatibility)
    if n > MAX_VERTICES:
        raise ValueError(f"penrose_value refuses n > {MAX_VERTICES}")
    if n == 1:
        return 1
    bits = np.array([e for e in range(n_edges(n)) if allowed >> e & 1], dtype=np.int64)
    total = 0
    n_sub = 1 << len(bits)
    for start in range(0, n_sub, _CHUNK):
        k = np.arange(start, min(start + _CHUNK, n_sub), dtype=np.int64)
        sub = np.zeros_like(k)
        for pos, e in enumerate(bits):
            sub |= ((k >> pos) & 1) << e
        connected = kernels.mask_flags(n, sub, backend) & kernels.CONNECTED != 0
        odd = np.bitwise_count(sub[connected]) % 2
        total += int(np.count_nonzero(odd == 0)) - int(np.count_nonzero(odd))
    return total


def penrose_tree_identity(n):
    """Right-hand side (-1)^(n-1) (n-1)! for n mutually incompatible polymers."""
    return (-1) ** (n - 1) * math.factorial(n - 1)
