"""Brute-force polymer-gas laboratory for small particle numbers.

Polymers are nonempty subsets of {1..N}, stored as bitmasks (bit i-1 for
particle i); two polymers are compatible when disjoint. With the one-particle
measure dq / (L K), singletons carry activity 1/K - 1 and larger polymers the
connected-graph integrals of Mayer bonds.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import graphs, kernels, quadrature
from .potentials import stability_constant, temperedness_in_box

MAX_DENSE_N = 6
MAX_QUADRATURE_N = 4
MAX_CLUSTER_N = 5
MAX_CLUSTER_ORDER = 6


class IdentityError(ArithmeticError):
    """Two routes to the same quantity disagree beyond rounding."""


@dataclass(frozen=True)
class ActivityTable:
    """Polymer activities zeta(V), indexed by subset bitmask (entry 0 unused)."""

    N: int
    K: float
    values: np.ndarray
    translation_invariant: bool = False

    def __post_init__(self):
        if not 1 <= self.N <= MAX_DENSE_N:
            raise ValueError(f"N must be in 1..{MAX_DENSE_N}")
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.values.shape != (1 << self.N,):
            raise ValueError("need one activity per subset of {1..N}")

    @classmethod
    def from_sizes(cls, N, K, by_size):
        """Translation-invariant table; ``by_size[n-1]`` is zeta for |V| = n."""
        if len(by_size) < N:
            raise ValueError("need an activity for every polymer size 1..N")
        masks = np.arange(1 << N)
        sizes = np.bitwise_count(masks).astype(np.int64)
        values = np.where(sizes > 0, np.asarray(list(by_size) + [0.0])[sizes - 1], 0.0)
        return cls(N, K, values, translation_invariant=True)

    @classmethod
    def from_function(cls, N, K, zeta):
        """Dense table from ``zeta(mask)``; singletons are set to 1/K - 1."""
        values = np.zeros(1 << N)
        for mask in range(1, 1 << N):
            values[mask] = 1.0 / K - 1.0 if mask.bit_count() == 1 else zeta(mask)
        return cls(N, K, values)

    def scaled(self, t):
        return ActivityTable(self.N, self.K, self.values * t, self.translation_invariant)

    def zeta(self, mask):
        return float(self.values[mask])

    def zeta_tilde(self, mask):
        """zeta with the singleton shift undone: zeta(V) + 1 when |V| = 1."""
        return self.zeta(mask) + (1.0 if mask.bit_count() == 1 else 0.0)

    def by_size(self):
        return [self.zeta((1 << n) - 1) for n in range(1, self.N + 1)]


# ------------------------------------------------------------ from a potential


def zeta_tilde_size(p, beta, L, K, n, quadrature_points, backend=None):
    """zeta~ for one polymer of n >= 2 particles: connected-graph integral in
    the measure dq / (L K)."""
    integral = quadrature.connected_integral(p, beta, L, n, quadrature_points, backend)
    return integral / (L * K) ** n


def zeta_from_potential(p, beta, L, K, N, quadrature_points=256, backend=None):
    """Activities of every polymer of N <= 4 particles of a 1-D potential.

    Bonds use the periodic potential in the box of side L.
    """
    if N > MAX_QUADRATURE_N:
        raise ValueError(f"quadrature activities are limited to N <= {MAX_QUADRATURE_N}")
    if K < 1:
        raise ValueError("K must be >= 1")
    by_size = [1.0 / K - 1.0]
    for n in range(2, N + 1):
        by_size.append(zeta_tilde_size(p, beta, L, K, n, quadrature_points, backend))
    return ActivityTable.from_sizes(N, K, by_size)


# ------------------------------------------------------------ partition function


def _compatible_collections(masks, used=0, start=0):
    yield ()
    for i in range(start, len(masks)):
        if masks[i] & used == 0:
            for rest in _compatible_collections(masks, used | masks[i], i + 1):
                yield (masks[i],) + rest


def partition_by_collections(table):
    """Sum over unordered families of pairwise disjoint polymers of prod zeta."""
    masks = list(range(1, 1 << table.N))
    terms = [math.prod(table.zeta(m) for m in coll) for coll in _compatible_collections(masks)]
    return math.fsum(terms), math.fsum(abs(t) for t in terms)


def _set_partitions(remaining):
    if remaining == 0:
        yield ()
        return
    low = remaining & -remaining
    rest = remaining ^ low
    sub = rest
    while True:
        block = sub | low
        for tail in _set_partitions(remaining ^ block):
            yield (block,) + tail
        if sub == 0:
            break
        sub = (sub - 1) & rest


def partition_by_set_partitions(table):
    """Sum over set partitions of {1..N} of prod zeta~ (singletons weigh 1/K)."""
    full = (1 << table.N) - 1
    terms = [math.prod(table.zeta_tilde(b) for b in part) for part in _set_partitions(full)]
    return math.fsum(terms), math.fsum(abs(t) for t in terms)


def polymer_partition(table, check=True, rtol=1e-12):
    """Z^int as a sum over compatible polymer collections.

    With ``check`` the partition form with zeta~ is evaluated as well and an
    IdentityError is raised if the two disagree beyond ``rtol`` relative to
    the larger absolute term sum.
    """
    value, scale = partition_by_collections(table)
    if check:
        other, other_scale = partition_by_set_partitions(table)
        if abs(value - other) > rtol * max(scale, other_scale, 1.0):
            raise IdentityError(f"collection form {value!r} != partition form {other!r}")
    return value


# ------------------------------------------------------------ cluster expansion


def cluster_log_terms(table, n_max, backend=None):
    """Order-by-order terms (1/n!) sum over ordered n-tuples of phi^T prod zeta."""
    if table.N > MAX_CLUSTER_N:
        raise ValueError(f"cluster sums are limited to N <= {MAX_CLUSTER_N}")
    if not 1 <= n_max <= MAX_CLUSTER_ORDER:
        raise ValueError(f"n_max must be in 1..{MAX_CLUSTER_ORDER}")
    masks = np.arange(1, 1 << table.N)
    zs = table.values[1:]
    inc = (masks[:, None] & masks[None, :]) != 0
    return [
        kernels.tuple_cluster_sum(zs, inc, graphs.phi_t_table(n), n, backend) / math.factorial(n)
        for n in range(1, n_max + 1)
    ]


def cluster_log_truncated(table, n_max, backend=None):
    """log Z^int truncated after clusters of n_max polymers."""
    return math.fsum(cluster_log_terms(table, n_max, backend))


# ------------------------------------------------------------ convergence criteria


def kp_singleton_ok(K, c):
    """(1 - 1/K) e^c + (e^c - 1)/e^c <= e^c - 1, equivalent to K <= g(c)."""
    ec = math.exp(c)
    return (1.0 - 1.0 / K) * ec + (ec - 1.0) / ec <= ec - 1.0


def kp_sum(zeta_bounds, a):
    """sum_{n>=2} C(N-1, n-1) |zeta_n| e^{a n} for N = len(zeta_bounds)."""
    N = len(zeta_bounds)
    return math.fsum(
        math.comb(N - 1, n - 1) * abs(zeta_bounds[n - 1]) * math.exp(a * n)
        for n in range(2, N + 1)
    )


def kp_check(zeta_bounds, a, c=None, K=1.0):
    """Convergence test for a translation-invariant polymer gas of N particles.

    ``zeta_bounds[n-1]`` bounds |zeta| for polymers of size n; the singleton
    activity is fixed by K. Both the multi-particle sum condition (rate a)
    and the singleton condition (rate c, default a) must hold.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    c = a if c is None else c
    if not c > 0:
        raise ValueError("c must be positive")
    return kp_sum(zeta_bounds, a) <= math.expm1(a) and kp_singleton_ok(K, c)


def zeta_tree_bound(n, beta, B, C_Lambda, volume, K, a):
    """Tree-graph bound on |zeta_n| e^{a n}:
    (e^{beta B + a}/K) n^(n-2) (e^{beta B + a} C_Lambda / (K volume))^(n-1)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    w = math.exp(beta * B + a)
    return w / K * graphs.tree_count(n) * (w * C_Lambda / (K * volume)) ** (n - 1)


def tree_bounds(p, beta, L, N, K, a):
    """|zeta_n| bounds for n = 1..N from the tree-graph estimate (a = 0 factor
    removed), with the singleton entry 1 - 1/K."""
    B = stability_constant(p)
    C = temperedness_in_box(p, beta, L)
    volume = L**p.dimension
    out = [1.0 - 1.0 / K]
    for n in range(2, N + 1):
        out.append(zeta_tree_bound(n, beta, B, C, volume, K, a) * math.exp(-a * n))
    return out


# ------------------------------------------------------------ combinatorial identities


def multinomial_factorial_sum(n_parts, j):
    """sum over m_1+..+m_p = j of multinomial(j; m) * prod m_i!, in exact integers."""
    T = [math.factorial(k) for k in range(j + 1)]
    for _ in range(n_parts - 1):
        T = [
            sum(math.comb(t, k) * math.factorial(k) * T[t - k] for k in range(t + 1))
            for t in range(j + 1)
        ]
    return T[j]


def step1_identity(n, K, tol=1e-14):
    """Both sides of the single-polymer resummation.

    lhs = sum_{m>=1} x^(m-1)/(m-1)! sum_{m_1+..+m_{n+1}=m-1} multinomial * prod m_i!
    with x = 1 - 1/K, summed until terms drop below ``tol``; rhs = K^(n+1).
    """
    if not 0 <= n <= 6:
        raise ValueError("n must be in 0..6")
    if not 1 <= K <= 4:
        raise ValueError("K must be in [1, 4]")
    x = 1.0 - 1.0 / K
    parts = n + 1
    # T[t] for t = 0.. grows by convolution; extend incrementally
    rows = [[1] for _ in range(parts)]  # rows[p][t]: p+1 parts, total t
    terms = []
    t = 0
    while True:
        if t > 0:
            rows[0].append(math.factorial(t))
            for p in range(1, parts):
                rows[p].append(sum(math.comb(t, k) * math.factorial(k) * rows[p - 1][t - k]
                                   for k in range(t + 1)))
        inner = rows[parts - 1][t] // math.factorial(t)
        term = inner * x**t
        terms.append(term)
        if x == 0.0 or (term < tol and t > 2 * parts):
            break
        t += 1
    return math.fsum(terms), K ** (n + 1)


def free_case_log(K, terms=40):
    """sum_{m<=terms} (-1)^(m-1) (1/K - 1)^m / m, which tends to -log K."""
    s = 1.0 / K - 1.0
    return math.fsum((-1) ** (m - 1) * s**m / m for m in range(1, terms + 1))


def density_factor(N, volume, n):
    """P(n) = (N-1)(N-2)...(N-n) / volume^n, and 0 for n = 0."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 0.0
    return math.prod((N - k) / volume for k in range(1, n + 1))


# ------------------------------------------------------------ direct partition function


def direct_Z_small(p, beta, L, N, quadrature_points=2048):
    """Z^per(N) = (1/N!) integral over Lambda^N of exp(-beta sum V^per), N <= 4."""
    if not 1 <= N <= MAX_QUADRATURE_N:
        raise ValueError(f"direct_Z_small handles N = 1..{MAX_QUADRATURE_N}")
    return quadrature.boltzmann_integral(p, beta, L, N, quadrature_points) / math.factorial(N)


@dataclass(frozen=True)
class Factorization:
    z_per: float
    z_free: float
    z_int: float
    residual: float


def check_factorization(p, beta, L, K, N, quadrature_points=2048, backend=None):
    """Compare Z^per with Z^free Z^int, Z^int built from polymer activities on
    the same grid."""
    z_per = direct_Z_small(p, beta, L, N, quadrature_points)
    table = zeta_from_potential(p, beta, L, K, N, quadrature_points, backend)
    z_int = polymer_partition(table)
    z_free = (L * K) ** N / math.factorial(N)
    return Factorization(z_per, z_free, z_int, abs(z_per - z_free * z_int) / abs(z_per))
