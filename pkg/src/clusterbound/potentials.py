"""Pair-potential catalog and the scalar quantities derived from it.

The catalog is closed: hard-core spheres in any dimension, hard rods on the
line, and the square well (hard core plus an attractive shell). Every entry
has finite range, so stability and temperedness constants are closed forms.
"""
import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

#: Energy of an overlapping hard-core pair. ``exp(-beta * INFINITE_ENERGY)``
#: is exactly 0.0 for every beta > 0.
INFINITE_ENERGY = math.inf


class Kind(enum.Enum):
    HARD_CORE = "hardcore"
    HARD_ROD = "hardrod"
    SQUARE_WELL = "squarewell"


@dataclass(frozen=True)
class PairPotential:
    """A catalog pair potential.

    ``sigma`` is the core diameter; for the square well the attractive shell
    spans ``sigma <= |x| < sigma + well_width`` with depth ``epsilon``.
    """

    kind: Kind
    sigma: float
    dimension: int = 3
    epsilon: float = 0.0
    well_width: float = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if int(self.dimension) != self.dimension or self.dimension < 1:
            raise ValueError("dimension must be an integer >= 1")
        if self.kind is Kind.HARD_ROD and self.dimension != 1:
            raise ValueError("hard rods live in dimension 1")
        if self.kind is Kind.SQUARE_WELL:
            if not self.epsilon >= 0:
                raise ValueError("epsilon must be non-negative")
            if not self.well_width > 0:
                raise ValueError("well_width must be positive")
        elif self.epsilon != 0.0 or self.well_width != 0.0:
            raise ValueError(f"{self.kind.value} takes no well parameters")

    @property
    def range(self):
        """Finite interaction range r_V: V vanishes for |x| >= range."""
        if self.kind is Kind.SQUARE_WELL:
            return self.sigma + self.well_width
        return self.sigma

    @property
    def repulsive(self):
        return self.kind is not Kind.SQUARE_WELL or self.epsilon == 0.0

    def spec(self):
        """Inverse of :func:`parse_potential`."""
        if self.kind is Kind.HARD_ROD:
            return f"hardrod:sigma={self.sigma!r}"
        text = f"{self.kind.value}:sigma={self.sigma!r},d={self.dimension}"
        if self.kind is Kind.SQUARE_WELL:
            text += f",epsilon={self.epsilon!r},width={self.well_width!r}"
        return text


def hard_core(sigma=1.0, dimension=3):
    return PairPotential(Kind.HARD_CORE, sigma, dimension)


def hard_rod(sigma=1.0):
    return PairPotential(Kind.HARD_ROD, sigma, 1)


def square_well(sigma=1.0, epsilon=1.0, well_width=0.5, dimension=3):
    return PairPotential(Kind.SQUARE_WELL, sigma, dimension, epsilon, well_width)


# ---------------------------------------------------------------- evaluation


def energy_at_distance(p, r):
    """Vectorized V as a function of the distance ``r = |x|``."""
    r = np.asarray(r, dtype=np.float64)
    out = np.where(r < p.sigma, INFINITE_ENERGY, 0.0)
    if p.kind is Kind.SQUARE_WELL:
        out = np.where((r >= p.sigma) & (r < p.range), -p.epsilon, out)
    return out


def mayer_f_at_distance(p, beta, r):
    """Vectorized ``exp(-beta V) - 1``; exactly -1 inside the hard core."""
    r = np.asarray(r, dtype=np.float64)
    out = np.where(r < p.sigma, -1.0, 0.0)
    if p.kind is Kind.SQUARE_WELL:
        out = np.where((r >= p.sigma) & (r < p.range), math.expm1(beta * p.epsilon), out)
    return out


def _as_displacement(p, x):
    x = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if x.ndim != 1 or x.shape[0] != p.dimension:
        raise ValueError(
            f"displacement has {x.size} components, potential has dimension {p.dimension}"
        )
    return x


def evaluate(p, x):
    """V(x) for one displacement vector (a scalar is accepted in d = 1)."""
    x = _as_displacement(p, x)
    return float(energy_at_distance(p, math.hypot(*x)))


def mayer_f(p, beta, x):
    if not beta > 0:
        raise ValueError("beta must be positive")
    x = _as_displacement(p, x)
    return float(mayer_f_at_distance(p, beta, math.hypot(*x)))


# ---------------------------------------------------------- derived constants


def ball_volume(radius, d):
    if d == 1:
        return 2.0 * radius
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * radius**d


def temperedness_integral(p, beta):
    """C(beta) = integral of 1 - exp(-beta |V(x)|) over R^d, in closed form."""
    if not beta > 0:
        raise ValueError("beta must be positive")
    core = ball_volume(p.sigma, p.dimension)
    if p.kind is not Kind.SQUARE_WELL:
        return core
    shell = ball_volume(p.range, p.dimension) - core
    return core + shell * -math.expm1(-beta * p.epsilon)


def well_neighbor_bound(p):
    """Upper bound on how many cores fit within the well range of one core.

    In d = 1 each side holds at most ``floor(width / sigma) + 1`` cores. For
    d >= 2 the disjoint spheres of radius sigma/2 centred within ``range``
    fill at most the ball of radius ``range + sigma/2`` minus the central
    sphere, giving ``(2 range / sigma + 1)^d - 1``.
    """
    if p.kind is not Kind.SQUARE_WELL:
        return 0
    if p.dimension == 1:
        return 2 * (math.floor(p.well_width / p.sigma) + 1)
    return math.floor((2 * p.range / p.sigma + 1) ** p.dimension - 1)


def stability_constant(p):
    """B such that the total energy of any N-particle configuration is >= -B N."""
    if p.repulsive:
        return 0.0
    return p.epsilon * well_neighbor_bound(p) / 2


# ---------------------------------------------------------- periodic images


class PeriodicEnergy(NamedTuple):
    energy: float
    images_overlap: bool


def image_shifts(p, L):
    """Integer shift vectors n covering every image with |x + nL| < range."""
    reach = math.ceil(p.range / L) + 1
    axis = range(-reach, reach + 1)
    return np.array(list(np.ndindex(*(len(axis),) * p.dimension)), dtype=np.int64) - reach


def wrap(x, L):
    """Map displacements componentwise into (-L/2, L/2]."""
    x = np.asarray(x, dtype=np.float64)
    return x - L * np.ceil(x / L - 0.5)


def periodic_energy_array(p, L, disp):
    """Periodic-image sum of V for displacements of shape (..., d)."""
    disp = np.asarray(disp, dtype=np.float64)
    total = np.zeros(disp.shape[:-1])
    for shift in image_shifts(p, L):
        r = np.sqrt(np.sum((disp + shift * L) ** 2, axis=-1))
        total = total + energy_at_distance(p, r)
    return total


def periodic_mayer_f_array(p, beta, L, disp):
    """``exp(-beta V^per) - 1`` for displacements of shape (..., d)."""
    with np.errstate(over="ignore"):
        return np.expm1(-beta * periodic_energy_array(p, L, disp))


def periodic_potential(p, L, x, tol=1e-12):
    """V^per(x) = sum over n in Z^d of V(x + nL).

    Only images within the interaction range contribute, so the sum is exact
    for the catalog; ``tol`` is kept for long-range entries and unused.
    ``images_overlap`` flags boxes with L <= 2 r_V, where a particle may see
    several images of another.
    """
    if not L > 0:
        raise ValueError("box side L must be positive")
    x = _as_displacement(p, x)
    if np.any(x <= -L / 2) or np.any(x > L / 2):
        raise ValueError("displacement must lie in (-L/2, L/2] componentwise")
    energy = float(periodic_energy_array(p, L, x[None, :])[0])
    return PeriodicEnergy(energy, L <= 2 * p.range)


# ------------------------------------------------------------------ parsing

_KEYS = {
    Kind.HARD_CORE: {"sigma", "d"},
    Kind.HARD_ROD: {"sigma", "d"},
    Kind.SQUARE_WELL: {"sigma", "d", "epsilon", "width"},
}
_DEFAULT_DIMENSION = {Kind.HARD_CORE: 3, Kind.HARD_ROD: 1, Kind.SQUARE_WELL: 3}


def parse_potential(spec):
    """Parse ``kind:key=value,...``, e.g. ``hardcore:sigma=1,d=3``.

    Raises ValueError naming the offending token.
    """
    spec = spec.strip()
    if not spec:
        raise ValueError("empty potential spec")
    name, _, rest = spec.partition(":")
    try:
        kind = Kind(name.strip().lower())
    except ValueError:
        raise ValueError(
            f"unknown potential kind {name!r} (expected one of "
            f"{', '.join(k.value for k in Kind)})"
        ) from None
    params = {}
    for token in filter(None, (t.strip() for t in rest.split(","))):
        key, eq, value = token.partition("=")
        key = key.strip()
        if not eq:
            raise ValueError(f"malformed token {token!r}: expected key=value")
        if key not in _KEYS[kind]:
            raise ValueError(f"unknown key {key!r} in token {token!r} for {kind.value}")
        try:
            params[key] = int(value) if key == "d" else float(value)
        except ValueError:
            raise ValueError(f"bad value in token {token!r}") from None
    if "sigma" not in params:
        raise ValueError(f"{kind.value} needs sigma")
    kwargs = dict(sigma=params["sigma"], dimension=params.get("d", _DEFAULT_DIMENSION[kind]))
    if kind is Kind.SQUARE_WELL:
        kwargs.update(epsilon=params.get("epsilon", 1.0), well_width=params.get("width", 0.5))
    return PairPotential(kind, **kwargs)


def temperedness_in_box(p, beta, L):
    """C_Lambda(beta): the temperedness integral restricted to (-L/2, L/2]^d.

    Equal to C(beta) once the box contains the interaction range; for
    smaller boxes only d = 1 has a closed form here.
    """
    if L >= 2 * p.range:
        return temperedness_integral(p, beta)
    if p.dimension != 1:
        raise ValueError("box smaller than the interaction range is only supported in d = 1")
    half = L / 2
    core = 2 * min(p.sigma, half)
    if p.kind is not Kind.SQUARE_WELL:
        return core
    shell = 2 * max(0.0, min(p.range, half) - p.sigma)
    return core + shell * -math.expm1(-beta * p.epsilon)
