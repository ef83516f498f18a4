"""Hot inner loops, each with a numba kernel and a vectorized numpy twin.

The public wrappers take ``backend=None`` (environment default), ``"numba"``
or ``"numpy"``. Both paths compute the same quantity; only summation order may
differ, so results agree to rounding, not bitwise.
"""
import itertools
import math

import numpy as np

from . import _backend
from ._backend import njit


def edge_pairs(n):
    """Vertex pairs (i, j), i < j, in edge-bit order (lexicographic)."""
    pi, pj = [], []
    for i in range(n):
        for j in range(i + 1, n):
            pi.append(i)
            pj.append(j)
    return np.array(pi, dtype=np.int64), np.array(pj, dtype=np.int64)


# --------------------------------------------------------------------------
# connectivity / 2-connectivity flags over a contiguous range of edge masks
# --------------------------------------------------------------------------

CONNECTED = 1
BICONNECTED = 2


@njit
def _reach_nb(adj, n, allowed, start):
    seen = np.int64(1) << start
    frontier = seen
    while frontier != 0:
        nxt = np.int64(0)
        for v in range(n):
            if (frontier >> v) & 1:
                nxt |= adj[v]
        nxt &= allowed & ~seen
        seen |= nxt
        frontier = nxt
    return seen


@njit
def _classify_nb(mask, n, pi, pj, adj):
    full = (np.int64(1) << n) - 1
    for v in range(n):
        adj[v] = 0
    for e in range(pi.shape[0]):
        if (mask >> e) & 1:
            adj[pi[e]] |= np.int64(1) << pj[e]
            adj[pj[e]] |= np.int64(1) << pi[e]
    if _reach_nb(adj, n, full, 0) != full:
        return 0
    if n > 2:
        for v in range(n):
            allowed = full & ~(np.int64(1) << v)
            s = 1 if v == 0 else 0
            if _reach_nb(adj, n, allowed, s) != allowed:
                return CONNECTED
    return CONNECTED | BICONNECTED


@njit
def _graph_flags_nb(n, start, stop, pi, pj):
    out = np.empty(stop - start, dtype=np.uint8)
    adj = np.zeros(n, dtype=np.int64)
    for t in range(stop - start):
        out[t] = _classify_nb(np.int64(start + t), n, pi, pj, adj)
    return out


def _reach_np(adj, n, allowed, start):
    seen = np.full(adj.shape[1], 1 << start, dtype=np.int64)
    for _ in range(n):
        nxt = np.zeros_like(seen)
        for v in range(n):
            nxt |= np.where((seen >> v) & 1 == 1, adj[v], 0)
        seen |= nxt & allowed
    return seen


def _graph_flags_np(n, masks):
    pi, pj = edge_pairs(n)
    adj = np.zeros((n, masks.shape[0]), dtype=np.int64)
    for e, (i, j) in enumerate(zip(pi, pj)):
        bit = (masks >> e) & 1
        adj[i] |= bit << j
        adj[j] |= bit << i
    full = (1 << n) - 1
    connected = _reach_np(adj, n, full, 0) == full
    biconnected = connected.copy()
    if n > 2:
        for v in range(n):
            allowed = full & ~(1 << v)
            s = 1 if v == 0 else 0
            biconnected &= _reach_np(adj, n, allowed, s) == allowed
    return (connected * CONNECTED + biconnected * BICONNECTED).astype(np.uint8)


def graph_flags(n, start, stop, backend=None):
    """Flags for every edge mask in ``[start, stop)`` of graphs on ``n`` vertices.

    Bit 0 marks connected graphs, bit 1 marks 2-connected ones (the single
    edge on two vertices counts as 2-connected).
    """
    backend = _backend.resolve(backend)
    if backend == "numba":
        pi, pj = edge_pairs(n)
        return _graph_flags_nb(n, start, stop, pi, pj)
    return _graph_flags_np(n, np.arange(start, stop, dtype=np.int64))


def mask_flags(n, masks, backend=None):
    """Like :func:`graph_flags` for an arbitrary array of masks."""
    masks = np.asarray(masks, dtype=np.int64)
    backend = _backend.resolve(backend)
    if backend == "numba":
        pi, pj = edge_pairs(n)
        return _mask_flags_nb(n, masks, pi, pj)
    return _graph_flags_np(n, masks)


@njit
def _mask_flags_nb(n, masks, pi, pj):
    out = np.empty(masks.shape[0], dtype=np.uint8)
    adj = np.zeros(n, dtype=np.int64)
    for t in range(masks.shape[0]):
        out[t] = _classify_nb(masks[t], n, pi, pj, adj)
    return out


# --------------------------------------------------------------------------
# sum over a fixed graph family of edge-weight products, per sample row
# --------------------------------------------------------------------------


@njit
def _graph_sum_nb(f, edge_idx, edge_ptr):
    n_rows = f.shape[0]
    n_graphs = edge_ptr.shape[0] - 1
    out = np.zeros(n_rows)
    for s in range(n_rows):
        acc = 0.0
        for g in range(n_graphs):
            prod = 1.0
            for k in range(edge_ptr[g], edge_ptr[g + 1]):
                prod *= f[s, edge_idx[k]]
                if prod == 0.0:
                    break
            acc += prod
        out[s] = acc
    return out


def _graph_sum_np(f, edge_idx, edge_ptr):
    out = np.zeros(f.shape[0])
    for g in range(edge_ptr.shape[0] - 1):
        cols = edge_idx[edge_ptr[g]:edge_ptr[g + 1]]
        out += np.prod(f[:, cols], axis=1)
    return out


def masks_to_csr(masks):
    """Pack edge masks into (edge_idx, edge_ptr) arrays for :func:`graph_sum`."""
    edge_idx, edge_ptr = [], [0]
    for mask in masks:
        mask = int(mask)
        e = 0
        while mask:
            if mask & 1:
                edge_idx.append(e)
            mask >>= 1
            e += 1
        edge_ptr.append(len(edge_idx))
    return np.array(edge_idx, dtype=np.int64), np.array(edge_ptr, dtype=np.int64)


def graph_sum(f, edge_idx, edge_ptr, backend=None):
    """Row-wise ``sum_g prod_{e in g} f[row, e]`` over a CSR-packed graph family."""
    f = np.ascontiguousarray(f, dtype=np.float64)
    if _backend.resolve(backend) == "numba":
        return _graph_sum_nb(f, edge_idx, edge_ptr)
    return _graph_sum_np(f, edge_idx, edge_ptr)


# --------------------------------------------------------------------------
# ordered-tuple cluster sum: sum over (V_1..V_n) of phi^T * prod zeta
# --------------------------------------------------------------------------


@njit
def _tuple_sum_nb(zs, inc, phi_t, n, edge_of):
    n_sub = zs.shape[0]
    idx = np.zeros(n, dtype=np.int64)
    prod = np.zeros(n)
    pmask = np.zeros(n, dtype=np.int64)
    total = 0.0
    comp = 0.0
    k = 0
    while k >= 0:
        if idx[k] == n_sub:
            k -= 1
            if k >= 0:
                idx[k] += 1
            continue
        cur = idx[k]
        p = zs[cur]
        m = np.int64(0)
        if k > 0:
            p *= prod[k - 1]
            m = pmask[k - 1]
            for j in range(k):
                if inc[idx[j], cur]:
                    m |= np.int64(1) << edge_of[j, k]
        if p == 0.0:
            idx[k] += 1
            continue
        if k == n - 1:
            # Kahan-compensated accumulation
            y = p * phi_t[m] - comp
            t = total + y
            comp = (t - total) - y
            total = t
            idx[k] += 1
        else:
            prod[k] = p
            pmask[k] = m
            k += 1
            idx[k] = 0
    return total


def _tuple_sum_np(zs, inc, phi_t, n, edge_of):
    n_sub = zs.shape[0]
    n_lead = max(0, n - 4)
    n_rest = n - n_lead
    grids = [
        np.arange(n_sub).reshape((1,) * a + (n_sub,) + (1,) * (n_rest - a - 1))
        for a in range(n_rest)
    ]
    partial = []
    for lead in itertools.product(range(n_sub), repeat=n_lead):
        idx = [np.int64(v) for v in lead] + grids
        mask = np.zeros((1,) * n_rest, dtype=np.int64)
        prod = np.ones((1,) * n_rest)
        for a in range(n):
            prod = prod * zs[idx[a]]
            for b in range(a + 1, n):
                mask = mask | (inc[idx[a], idx[b]].astype(np.int64) << edge_of[a, b])
        partial.append(float(np.sum(prod * phi_t[mask])))
    return math.fsum(partial)


def tuple_cluster_sum(zs, inc, phi_t, n, backend=None):
    """Sum over ordered n-tuples of polymers of ``phi_t[incompat] * prod zs``.

    ``zs`` holds one activity per polymer, ``inc`` the boolean incompatibility
    matrix between polymers and ``phi_t`` the truncated-function table indexed
    by the incompatibility edge mask of the tuple (see graphs.phi_t_table).
    """
    zs = np.ascontiguousarray(zs, dtype=np.float64)
    inc = np.ascontiguousarray(inc, dtype=np.bool_)
    edge_of = np.zeros((n, n), dtype=np.int64)
    pi, pj = edge_pairs(n)
    for e, (i, j) in enumerate(zip(pi, pj)):
        edge_of[i, j] = edge_of[j, i] = e
    if _backend.resolve(backend) == "numba":
        return float(_tuple_sum_nb(zs, inc, phi_t, n, edge_of))
    return _tuple_sum_np(zs, inc, phi_t, n, edge_of)
