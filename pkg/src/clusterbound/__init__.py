"""Convergence radii and Mayer coefficients for the canonical cluster expansion."""

__version__ = "0.1.0"

from .bounds import (  # noqa: F401
    F,
    eval_G,
    feasibility,
    find_K_star,
    g_function,
    maximize_F,
    optimize_K,
    rho_star,
    rho_star_known,
)
from .potentials import PairPotential, parse_potential  # noqa: F401
