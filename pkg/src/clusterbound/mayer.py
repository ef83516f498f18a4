"""Irreducible Mayer coefficients by graph enumeration plus Monte Carlo.

beta_m = (1/m!) sum over 2-connected graphs g on {1..m+1} of the integral
of prod_{ij in g} f(q_i - q_j) over q_2..q_{m+1}, with q_1 pinned at 0.

For a finite-range potential every vertex of a 2-connected graph on m+1
vertices sits within graph distance m of vertex 1, so the integrand vanishes
unless |q_i| < m r_V; sampling the cube [-m r_V, m r_V]^d per point is exact
in expectation.
"""
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import graphs, kernels, streams
from .potentials import mayer_f_at_distance, periodic_mayer_f_array, wrap

MAX_ORDER = 4
MIN_SAMPLES = 1000


@dataclass(frozen=True)
class MayerEstimate:
    m: int
    mean: float
    std_error: float
    samples: int
    seed: int
    box: float | None = None
    overlap_warning: bool = False

    def as_dict(self):
        out = asdict(self)
        if self.box is None:
            del out["box"], out["overlap_warning"]
        return out


def _check_order(m, samples, beta):
    if not 1 <= m <= MAX_ORDER:
        raise ValueError(f"order m must be in 1..{MAX_ORDER}")
    if samples < MIN_SAMPLES:
        raise ValueError(f"need at least {MIN_SAMPLES} samples")
    if not beta > 0:
        raise ValueError("beta must be positive")


@dataclass
class _Integrand:
    """Biconnected-graph sum of Mayer bonds for m+1 points, q_1 = 0."""

    m: int
    d: int
    bond: object  # displacements (rows, edges, d) -> f values (rows, edges)
    backend: str | None = None

    def __post_init__(self):
        self.pi, self.pj = kernels.edge_pairs(self.m + 1)
        self.edge_idx, self.edge_ptr = kernels.masks_to_csr(graphs.biconnected_masks(self.m + 1))

    def __call__(self, free_points):
        rows = free_points.shape[0]
        q = np.concatenate([np.zeros((rows, 1, self.d)), free_points], axis=1)
        disp = q[:, self.pi, :] - q[:, self.pj, :]
        f = self.bond(disp)
        return kernels.graph_sum(f, self.edge_idx, self.edge_ptr, self.backend)


def _estimate(integrand, low, side, m, d, samples, seed, stream, shards, block_size):
    def block(b, n):
        gen = streams.block_generator(seed, stream, b)
        pts = low + side * gen.random((n, m, d))
        vals = integrand(pts)
        return n, float(np.sum(vals)), float(np.sum(vals * vals))

    partials = streams.run_blocks(block, samples, shards, block_size)
    n, s1, s2 = streams.merge_moments(partials)
    scale = side ** (d * m) / math.factorial(m)
    var = max(s2 - s1 * s1 / n, 0.0) / (n - 1)
    return scale * s1 / n, scale * math.sqrt(var / n)


def beta_m_monte_carlo(p, beta, m, samples, seed=streams.DEFAULT_SEED, shards=1,
                       backend=None, block_size=streams.BLOCK_SIZE):
    """Monte Carlo estimate of beta_m for a catalog potential."""
    _check_order(m, samples, beta)
    seed = streams.check_seed(seed)
    d = p.dimension
    R = m * p.range
    integrand = _Integrand(
        m, d, lambda disp: mayer_f_at_distance(p, beta, np.sqrt(np.sum(disp**2, axis=-1))),
        backend,
    )
    mean, se = _estimate(integrand, -R, 2 * R, m, d, samples, seed, streams.MAYER,
                         shards, block_size)
    return MayerEstimate(m, mean, se, samples, seed)


def w_star_finite_volume(p, beta, m, L, samples, seed=streams.DEFAULT_SEED, shards=1,
                         backend=None, block_size=streams.BLOCK_SIZE):
    """Estimate (|L^d|^m / m!) w*(V), |V| = m+1, in the periodic box of side L.

    Points are uniform in (-L/2, L/2]^d, bonds use the periodic potential.
    ``overlap_warning`` is set when L <= 2 m r_V, where periodic images
    distort the support and the value differs from beta_m.
    """
    _check_order(m, samples, beta)
    if not L > 0:
        raise ValueError("box side L must be positive")
    seed = streams.check_seed(seed)
    d = p.dimension
    integrand = _Integrand(
        m, d, lambda disp: periodic_mayer_f_array(p, beta, L, wrap(disp, L)), backend
    )
    mean, se = _estimate(integrand, -L / 2, L, m, d, samples, seed, streams.FINITE_VOLUME,
                         shards, block_size)
    return MayerEstimate(m, mean, se, samples, seed, box=L,
                         overlap_warning=L <= 2 * m * p.range)


def combine_estimates(estimates):
    """Inverse-variance weighted mean of independent estimates of the same beta_m."""
    weights = [1.0 / e.std_error**2 for e in estimates]
    total = math.fsum(weights)
    mean = math.fsum(w * e.mean for w, e in zip(weights, estimates)) / total
    first = estimates[0]
    return MayerEstimate(first.m, mean, 1.0 / math.sqrt(total),
                         sum(e.samples for e in estimates), first.seed)


def beta_m_exact_hardrod(m, sigma=1.0):
    """Hard-rod coefficient -((m+1)/m) sigma^m, read off the Tonks free energy."""
    if m < 1:
        raise ValueError("m must be >= 1")
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    return -(m + 1) / m * sigma**m


# ---------------------------------------------------------------- free energy


@dataclass(frozen=True)
class FreeEnergySeries:
    beta: float
    coefficients: tuple
    M: int
    rho_max: float = math.inf

    def __post_init__(self):
        if len(self.coefficients) != self.M:
            raise ValueError("need exactly M coefficients")

    def __call__(self, rho):
        return free_energy_series(rho, self.beta, self.coefficients, self.M)


def free_energy_series(rho, beta, coefficients, M=None):
    """(1/beta) [rho (log rho - 1) - sum_{m<=M} rho^(m+1) beta_m / (m+1)]."""
    if not rho > 0:
        raise ValueError("rho must be positive")
    if not beta > 0:
        raise ValueError("beta must be positive")
    M = len(coefficients) if M is None else M
    if len(coefficients) < M:
        raise ValueError("fewer coefficients than the truncation order")
    terms = [rho * math.log(rho), -rho]
    terms += [-(rho ** (m + 1)) * coefficients[m - 1] / (m + 1) for m in range(1, M + 1)]
    return math.fsum(terms) / beta


def ideal_free_energy(rho, beta):
    return free_energy_series(rho, beta, (), 0)


def tonks_free_energy(rho, beta, sigma=1.0):
    """Exact hard-rod free energy per length, (1/beta)[rho log(rho/(1 - rho sigma)) - rho]."""
    if not 0 < rho * sigma < 1:
        raise ValueError("need 0 < rho sigma < 1")
    return math.fsum([rho * math.log(rho), -rho * math.log1p(-rho * sigma), -rho]) / beta


def tonks_tail(rho, sigma, M):
    """rho * sum_{m>M} (rho sigma)^m / m, the hard-rod series remainder after order M."""
    x = rho * sigma
    if not 0 <= x < 1:
        raise ValueError("need 0 <= rho sigma < 1")
    terms = []
    m = M + 1
    term = x**m / m
    while term > 0 and (not terms or term > 1e-40 * terms[0]):
        terms.append(term)
        m += 1
        term = x**m / m
    return rho * math.fsum(terms)
