"""Tensor-grid integrals over a periodic 1-D box with one point pinned.

Translation invariance of the periodic potential lets us pin q_1 = 0 and
integrate the remaining n-1 coordinates with the periodic rectangle rule on
the lattice x_k = k h, h = L/P, wrapped into (-L/2, L/2]. The full box
integral is L times that. Every pair displacement, pinned or not, is then a
multiple of h, so identities that hold pointwise (such as the expansion of
prod(1 + f) over graphs) also hold exactly on the grid.
"""
import functools
import math

import numpy as np

from . import graphs, kernels
from .potentials import periodic_mayer_f_array, wrap

_ROWS_PER_CHUNK = 1 << 18


def check_points(P):
    if P < 2 or P & (P - 1):
        raise ValueError("quadrature point count must be a power of two >= 2")


def _check_1d(p):
    if p.dimension != 1:
        raise ValueError("grid quadrature is implemented for 1-D potentials only")


def pinned_grid_integral(p, beta, L, n, P, weight):
    """Integral over Lambda^n of ``weight(f)``, where f holds the periodic
    Mayer bond of every vertex pair (columns in edge-bit order)."""
    _check_1d(p)
    check_points(P)
    if n == 1:
        return L * float(weight(np.zeros((1, 0)))[0])
    h = L / P
    nodes = wrap(np.arange(P) * h, L)
    pi, pj = kernels.edge_pairs(n)
    total_rows = P ** (n - 1)
    partial = []
    for start in range(0, total_rows, _ROWS_PER_CHUNK):
        flat = np.arange(start, min(start + _ROWS_PER_CHUNK, total_rows), dtype=np.int64)
        q = np.zeros((flat.size, n))
        rem = flat
        for axis in range(n - 1, 0, -1):
            rem, k = np.divmod(rem, P)
            q[:, axis] = nodes[k]
        disp = wrap(q[:, pi] - q[:, pj], L)[..., None]
        f = periodic_mayer_f_array(p, beta, L, disp)
        partial.append(float(np.sum(weight(f))))
    return L * h ** (n - 1) * math.fsum(partial)


def connected_weight(n, backend=None):
    edge_idx, edge_ptr = kernels.masks_to_csr(graphs.connected_masks(n))
    return lambda f: kernels.graph_sum(f, edge_idx, edge_ptr, backend)


def boltzmann_weight(f):
    """exp(-beta sum V^per) as the product of (1 + f) over all pairs."""
    return np.prod(1.0 + f, axis=1)


# ------------------------------------------------------------ contraction path
#
# On the lattice every bond depends only on the index difference of its two
# endpoints, so each bond is a circulant matrix. With q_1 pinned at index 0,
# an n <= 4 point integral is a handful of elementwise products plus one
# matrix product for the (3, 4) bond: O(P^3) flops in BLAS instead of a
# P^(n-1) x n(n-1)/2 Python-level scan.

MAX_CONTRACT_N = 4
# edge bits of the pairs (1,2) (1,3) (1,4) (2,3) (2,4) (3,4) for n = 4
_E12, _E13, _E14, _E23, _E24, _E34 = range(6)


def lattice_bond(p, beta, L, P, shift=0.0):
    """Periodic Mayer bond at displacement k h, k = 0..P-1, plus ``shift``
    (0 for f, 1 for the Boltzmann factor 1 + f)."""
    check_points(P)
    nodes = wrap(np.arange(P) * (L / P), L)
    return periodic_mayer_f_array(p, beta, L, nodes[:, None]) + shift


@functools.lru_cache(maxsize=4)
def _circulant_index(P):
    k = np.arange(P)
    return (k[None, :] - k[:, None]) % P


def _contract(n, bonds, P):
    """Lattice sum over q_2..q_n (q_1 = 0) of the product of the given bonds.

    ``bonds`` maps an edge bit to its bond vector; missing edges weigh 1.
    """
    def vec(e):
        return bonds[e] if e in bonds else np.ones(P)

    def mat(e):
        return bonds[e][_circulant_index(P)] if e in bonds else 1.0

    if n == 1:
        return 1.0
    if n == 2:
        return float(np.sum(vec(0)))
    if n == 3:
        return float(np.sum(vec(0)[:, None] * mat(2) * vec(1)[None, :]))
    A = vec(_E12)[:, None] * vec(_E13)[None, :] * mat(_E23)
    B = vec(_E14)[None, :] * mat(_E24)
    if _E34 in bonds:
        return float(np.sum((A @ mat(_E34)) * B))
    return float(np.sum(np.sum(A, axis=1) * np.sum(np.broadcast_to(B, (P, P)), axis=1)))


def family_integral(p, beta, L, n, P, masks):
    """Integral over Lambda^n of sum over graphs g in ``masks`` of prod f_e.

    Graphs sharing their bonds at vertex 4 are merged before the matrix
    product, so at most eight contractions are needed for n = 4.
    """
    _check_1d(p)
    if not 1 <= n <= MAX_CONTRACT_N:
        raise ValueError(f"contraction quadrature handles n = 1..{MAX_CONTRACT_N}")
    f = lattice_bond(p, beta, L, P)
    h = L / P
    if n < 4:
        total = math.fsum(
            _contract(n, {e: f for e in range(graphs.n_edges(n)) if m >> e & 1}, P)
            for m in map(int, masks)
        )
        return L * h ** (n - 1) * total
    idx = _circulant_index(P)
    F = f[idx]
    groups = {}
    for m in map(int, masks):
        a_bits = m & (1 << _E12 | 1 << _E13 | 1 << _E23)
        key = m & ~(1 << _E12 | 1 << _E13 | 1 << _E23)
        A = ((f if a_bits >> _E12 & 1 else np.ones(P))[:, None]
             * (f if a_bits >> _E13 & 1 else np.ones(P))[None, :])
        if a_bits >> _E23 & 1:
            A = A * F
        groups[key] = groups.get(key, 0.0) + A
    partial = []
    for key, A in sorted(groups.items()):
        B = np.broadcast_to((f if key >> _E14 & 1 else np.ones(P))[None, :], (P, P))
        if key >> _E24 & 1:
            B = B * F
        if key >> _E34 & 1:
            partial.append(float(np.sum((A @ F) * B)))
        else:
            partial.append(float(np.sum(np.sum(A, axis=1) * np.sum(B, axis=1))))
    return L * h**3 * math.fsum(partial)


def connected_integral(p, beta, L, n, P, backend=None):
    """Integral over Lambda^n of the connected-graph sum of periodic bonds."""
    if n <= MAX_CONTRACT_N:
        return _connected_cached(p, beta, L, n, P)
    return pinned_grid_integral(p, beta, L, n, P, connected_weight(n, backend))


@functools.lru_cache(maxsize=64)
def _connected_cached(p, beta, L, n, P):
    return family_integral(p, beta, L, n, P, graphs.connected_masks(n))


def boltzmann_integral(p, beta, L, n, P):
    """Integral over Lambda^n of the periodic Boltzmann factor."""
    if n <= MAX_CONTRACT_N:
        _check_1d(p)
        w = lattice_bond(p, beta, L, P, shift=1.0)
        return L * (L / P) ** (n - 1) * _contract(n, dict.fromkeys(range(graphs.n_edges(n)), w), P)
    return pinned_grid_integral(p, beta, L, n, P, boltzmann_weight)
