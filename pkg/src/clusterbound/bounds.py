"""Variational convergence bounds for the canonical cluster expansion.

The central object is

    F(u) = max_{a>0} log[1 + u(1 - e^-a)] / (e^a [1 + u(1 - e^-a)])

with u = e^{-beta B} K. Everything else (G = 1/F, the admissible K, the
radii) is composed from F, its maximizer a*(u) and the feasibility function
g(x) = [1 - (1 - e^-x)^2]^-1.
"""
import math
from dataclasses import dataclass

import numpy as np

LN2 = math.log(2.0)
INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0

GRID_POINTS = 128
A_MIN = 1e-6
A_MAX = 64.0
DEFAULT_TOL = 1e-10
SCAN_POINTS = 17


class BisectionError(RuntimeError):
    """A bisection predicate turned out non-monotone on its bracket."""


def f_objective(u, a):
    """The function maximized in F(u), evaluated at a single ``a > 0``."""
    if not a > 0:
        raise ValueError("a must be positive")
    if u < 0:
        raise ValueError("u must be non-negative")
    s = u * -math.expm1(-a)
    return math.log1p(s) / (math.exp(a) * (1.0 + s))


def _objective_array(u, a):
    s = u * -np.expm1(-a)
    return np.log1p(s) / (np.exp(a) * (1.0 + s))


def golden_section_max(func, lo, hi, tol):
    """Maximize a unimodal ``func`` on [lo, hi]; returns (x, f(x), evaluations)."""
    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = func(c), func(d)
    evals = 2
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = func(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = func(d)
        evals += 1
    x = 0.5 * (lo + hi)
    return x, func(x), evals + 1


@dataclass(frozen=True)
class FMaximization:
    u: float
    value: float
    a_star: float
    evaluations: int
    limit: bool = False  # u == 0: degenerate maximizer, a_star is the u -> 0 limit


def maximize_F(u, tol=DEFAULT_TOL, grid_points=GRID_POINTS):
    """Global maximum of :func:`f_objective` over a > 0.

    A geometric grid over [a_min, 64] locates the best bracket, then golden
    section refines it to width ``tol``. ``a_min`` is 1e-6, pushed down to
    1e-2/u for very large u, where the maximizer (close to 1.7/u) would
    otherwise fall below the grid.
    """
    if u < 0:
        raise ValueError("u must be non-negative")
    if u == 0:
        return FMaximization(0.0, 0.0, LN2, 0, limit=True)
    a_min = min(A_MIN, 1e-2 / u)
    grid = np.geomspace(a_min, A_MAX, grid_points)
    values = _objective_array(u, grid)
    i = int(np.argmax(values))
    lo = float(grid[max(i - 1, 0)])
    hi = float(grid[min(i + 1, grid_points - 1)])
    a_star, value, evals = golden_section_max(lambda a: f_objective(u, a), lo, hi, tol)
    if values[i] > value:  # maximizer on the grid edge
        a_star, value = float(grid[i]), float(values[i])
    return FMaximization(float(u), value, a_star, grid_points + evals)


def F(u, tol=DEFAULT_TOL):
    return maximize_F(u, tol).value


def a_star(u, tol=DEFAULT_TOL):
    return maximize_F(u, tol).a_star


def eval_G(u, tol=DEFAULT_TOL):
    """G(u) = min_a e^a [1 + u(1-e^-a)] / log[1 + u(1-e^-a)] = 1 / F(u)."""
    value = F(u, tol)
    return math.inf if value == 0.0 else 1.0 / value


def g_function(x):
    """g(x) = [1 - (1 - e^-x)^2]^-1, increasing from g(0+) = 1."""
    if x < 0:
        raise ValueError("x must be non-negative")
    y = -math.expm1(-x)
    return 1.0 / (1.0 - y * y)


def feasibility_margin(u, K, tol=DEFAULT_TOL):
    """g(a*(u)) - K together with the a* used."""
    a = maximize_F(u, tol).a_star
    return g_function(a) - K, a


def feasibility(K, beta, B, tol=DEFAULT_TOL):
    """Whether K satisfies K <= g(a*(e^{-beta B} K)); returns (feasible, a*)."""
    if K < 1:
        raise ValueError("K must be >= 1")
    if not beta > 0 or B < 0:
        raise ValueError("need beta > 0 and B >= 0")
    margin, a = feasibility_margin(math.exp(-beta * B) * K, K, tol)
    return margin >= 0.0, a


def _bisect_boundary(margin, lo, hi, width):
    """Largest x in [lo, hi] with margin(x) >= 0, for margin decreasing in x.

    A coarse pre-scan plus every bisection point are kept so the monotonicity
    of the predicate can be checked over the whole bracket.
    """
    seen = [(x, margin(x)) for x in map(float, np.linspace(lo, hi, SCAN_POINTS))]
    if seen[0][1] < 0:
        raise BisectionError(f"predicate fails at the lower end {lo}")
    _check_monotone(seen)
    if seen[-1][1] >= 0:
        return hi
    lo = max(x for x, m in seen if m >= 0)
    hi = min(x for x, m in seen if m < 0)
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        m = margin(mid)
        seen.append((mid, m))
        if m >= 0:
            lo = mid
        else:
            hi = mid
    _check_monotone(seen)
    return lo


def _check_monotone(seen):
    signs = [m >= 0 for _, m in sorted(seen)]
    if signs != sorted(signs, reverse=True):
        raise BisectionError("feasibility predicate is not monotone on the bracket")


def find_K_star(tol=1e-4, ftol=DEFAULT_TOL):
    """Largest K >= 1 feasible for every beta > 0, B >= 0.

    Since e^{-beta B} K <= K, a*(u) decreases in u and g increases, the worst
    case is beta B = 0, i.e. u = K.
    """
    return _bisect_boundary(lambda K: feasibility_margin(K, K, ftol)[0], 1.0, 2.0, tol)


def _check_radius_args(C_beta, K):
    if not C_beta > 0:
        raise ValueError("C_beta must be positive")
    if K < 1:
        raise ValueError("K must be >= 1")


def rho_star(beta, B, C_beta, K, tol=DEFAULT_TOL):
    """rho* = K / (e^{beta B} C_beta) * F(e^{-beta B} K). Feasibility is not checked."""
    _check_radius_args(C_beta, K)
    damp = math.exp(-beta * B)
    return K * damp / C_beta * F(damp * K, tol)


def rho_star_known(beta, B, C_beta, tol=DEFAULT_TOL):
    """The K = 1 radius e^{-beta B} F(e^{-beta B}) / C_beta."""
    return rho_star(beta, B, C_beta, 1.0, tol)


@dataclass(frozen=True)
class BoundsReport:
    beta: float
    B: float
    C_beta: float
    K: float
    u: float
    F_u: float
    a_star: float
    g_of_a_star: float
    feasible: bool
    rho_star: float
    rho_star_1: float

    @property
    def ratio(self):
        return self.rho_star / self.rho_star_1 if self.rho_star_1 > 0 else math.inf


def bounds_report(beta, B, C_beta, K, tol=DEFAULT_TOL):
    _check_radius_args(C_beta, K)
    damp = math.exp(-beta * B)
    u = damp * K
    fm = maximize_F(u, tol)
    g_a = g_function(fm.a_star)
    return BoundsReport(
        beta=beta,
        B=B,
        C_beta=C_beta,
        K=K,
        u=u,
        F_u=fm.value,
        a_star=fm.a_star,
        g_of_a_star=g_a,
        feasible=K <= g_a,
        rho_star=K * damp / C_beta * fm.value,
        rho_star_1=rho_star_known(beta, B, C_beta, tol),
    )


def optimize_K(beta, B, C_beta, K_max=4.0, tol=1e-8):
    """Largest feasible K in [1, K_max], which maximizes rho* since K F(e^{-beta B} K)
    increases with K. K = 1 is always feasible."""
    _check_radius_args(C_beta, 1.0)
    if K_max < 1:
        raise ValueError("K_max must be >= 1")
    damp = math.exp(-beta * B)
    K = _bisect_boundary(lambda k: feasibility_margin(damp * k, k)[0], 1.0, K_max, tol)
    return bounds_report(beta, B, C_beta, K)


def threshold_u(K, tol=1e-10):
    """The u at which g(a*(u)) = K, i.e. the largest e^{-beta B} K that keeps K feasible.

    Returns +inf when K is feasible for every u <= K.
    """
    margin = lambda u: feasibility_margin(u, K)[0]
    if margin(K) >= 0:
        return math.inf
    return _bisect_boundary(margin, 1e-12, K, tol)


def emit_curves(u_grid, tol=DEFAULT_TOL):
    """Rows (u, F(u), a*(u), g(a*(u))) over an ascending grid of u > 0."""
    u_grid = [float(u) for u in u_grid]
    if any(u <= 0 for u in u_grid):
        raise ValueError("u values must be positive")
    if any(b <= a for a, b in zip(u_grid, u_grid[1:])):
        raise ValueError("u grid must be strictly ascending")
    rows = []
    for u in u_grid:
        fm = maximize_F(u, tol)
        rows.append((u, fm.value, fm.a_star, g_function(fm.a_star)))
    return rows
