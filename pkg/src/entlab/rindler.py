"""Angular quantization of the half-space: real angular waves K_{i ell}(m x),
their turning-point structure, the discrete frequency spectrum under a
short-distance regulator, Boltzmann weights of the 2*pi-thermal state,
geometric entropy, and the Kruskal-Szekeres chart of the Schwarzschild
exterior.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import lambertw

from . import numerics

__all__ = [
    "AngularMode",
    "AngularSpectrum",
    "TurningPointCensus",
    "SchwarzschildPoint",
    "KruskalPoint",
    "angular_wave",
    "classify_turning_point",
    "discrete_spectrum",
    "thermal_weights",
    "mode_entropy",
    "geometric_entropy",
    "to_kruskal",
    "from_kruskal",
]

BETA = 2.0 * math.pi  # inverse temperature of the half-space state
_RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class AngularMode:
    """Angular frequency ell of a massive wave; the turning point sits at
    x = ell / mass."""

    ell: float
    mass: float = 1.0

    def __post_init__(self):
        if self.ell < 0.0:
            raise ValueError("ell must be nonnegative")
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")

    @property
    def turning_point(self) -> float:
        return self.ell / self.mass

    @property
    def normalization(self) -> float:
        """Canonical-commutator normalization 1/sqrt(2 sinh(pi ell)).

        Recorded as metadata; infinite in the ell -> 0 limit.
        """
        if self.ell == 0.0:
            return math.inf
        return 1.0 / math.sqrt(2.0 * math.sinh(math.pi * self.ell))


@dataclass(frozen=True)
class AngularSpectrum:
    """Discrete angular frequencies selected by the boundary condition
    K_{i ell}(mass * epsilon) = 0 at the regulator distance epsilon."""

    epsilon: float
    mass: float
    ell_values: np.ndarray

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ValueError("epsilon must be positive")
        ells = np.asarray(self.ell_values, dtype=float)
        if np.any(np.diff(ells) <= 0.0):
            raise ValueError("ell_values must be strictly ascending")
        ells.setflags(write=False)
        object.__setattr__(self, "ell_values", ells)

    def __len__(self) -> int:
        return self.ell_values.size


@dataclass(frozen=True)
class TurningPointCensus:
    x_star: float
    oscillatory_interval: tuple[float, float]
    decay_interval: tuple[float, float]
    oscillatory_sign_changes: int
    decay_sign_changes: int


def angular_wave(mode: AngularMode, x) -> float | np.ndarray:
    """Real angular wave K_{i ell}(mass * x); oscillatory below the turning
    point, exponentially decaying above it.  x must be positive (the
    wavelength vanishes at the origin)."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr <= 0.0):
        raise ValueError("x must be positive")
    return numerics.bessel_K_imag(mode.ell, mode.mass * x_arr)


def _count_sign_changes(values: np.ndarray) -> int:
    s = np.sign(values)
    s = s[s != 0.0]
    return int(np.sum(s[:-1] * s[1:] < 0))


def classify_turning_point(
    mode: AngularMode,
    resolution: int = 1000,
    x_max: float | None = None,
) -> TurningPointCensus:
    """Census of sign changes on both sides of the turning point
    x* = ell/mass, from dense sampling at the given resolution (points per
    region, >= 1000)."""
    if resolution < 1000:
        raise ValueError("resolution must be at least 1000 points")
    x_star = mode.turning_point
    if x_max is None:
        x_max = x_star + 22.0 / mode.mass
    if x_max <= x_star:
        raise ValueError("x_max must exceed the turning point")

    osc_changes = 0
    if x_star > 0.0:
        lo = x_star / resolution
        grid = np.linspace(lo, x_star, resolution)
        osc_changes = _count_sign_changes(angular_wave(mode, grid))
    grid = np.linspace(x_star + (x_max - x_star) / resolution, x_max, resolution)
    decay_changes = _count_sign_changes(angular_wave(mode, grid))
    return TurningPointCensus(
        x_star=x_star,
        oscillatory_interval=(0.0, x_star),
        decay_interval=(x_star, x_max),
        oscillatory_sign_changes=osc_changes,
        decay_sign_changes=decay_changes,
    )


def discrete_spectrum(
    mass: float,
    epsilon: float,
    ell_max: float,
    scan_points_per_unit: float = 1000.0,
) -> AngularSpectrum:
    """Discrete angular frequencies: the roots of ell -> K_{i ell}(m epsilon)
    in (0, ell_max], ascending.

    Every root re-evaluates to |K| <= 1e-8.  An empty spectrum (no roots in
    range) is returned with a warning.
    """
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    if ell_max <= 0.0:
        raise ValueError("ell_max must be positive")
    x0 = mass * epsilon

    def boundary(ell):
        return numerics.bessel_K_imag(ell, x0)

    lo = min(1e-4, ell_max / 2.0)
    roots = numerics.find_roots(boundary, (lo, ell_max),
                                scan_points_per_unit=scan_points_per_unit,
                                f_tol=_RESIDUAL_TOL, vectorized=True)
    if roots.size == 0:
        warnings.warn(
            f"no angular frequencies below ell_max={ell_max} at "
            f"epsilon={epsilon}", numerics.RootCountWarning)
    residuals = np.abs(numerics.bessel_K_imag(roots, x0)) if roots.size else np.array([])
    if roots.size and residuals.max() > _RESIDUAL_TOL:
        raise RuntimeError(
            f"root residual {residuals.max():.3e} above {_RESIDUAL_TOL}")
    return AngularSpectrum(epsilon=epsilon, mass=mass, ell_values=roots)


def thermal_weights(spectrum: AngularSpectrum, n_max: int) -> np.ndarray:
    """Occupation weights of the 2*pi-thermal state, one row per mode:
    p(n) = (1 - e^{-2 pi ell}) e^{-2 pi ell n} for n = 0..n_max.

    Weights below the double-precision floor underflow to exact zero.
    """
    if len(spectrum) == 0:
        raise ValueError("spectrum is empty")
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    ells = spectrum.ell_values[:, None]
    n = np.arange(n_max + 1)[None, :]
    log_p = np.log1p(-np.exp(-BETA * ells)) - BETA * ells * n
    with np.errstate(under="ignore"):
        return np.exp(log_p)


def mode_entropy(ell: float) -> float:
    """Closed-form entropy (nats) of one bosonic mode of frequency ell at
    inverse temperature 2*pi."""
    be = BETA * ell
    return float(be / np.expm1(be) - np.log1p(-np.exp(-be)))


def geometric_entropy(spectrum: AngularSpectrum) -> float:
    """Total entropy of the regulated thermal state, summed over modes;
    zero for an empty spectrum and growing as the spectrum gains low-ell
    modes."""
    return float(sum(mode_entropy(ell) for ell in spectrum.ell_values))


# --- Kruskal-Szekeres chart of the Schwarzschild exterior -------------------


@dataclass(frozen=True)
class SchwarzschildPoint:
    """Exterior point (r > 2M, t) of a black hole of mass M."""

    r: float
    t: float
    mass: float

    def __post_init__(self):
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")
        if self.r <= 2.0 * self.mass:
            raise ValueError(
                f"r={self.r} not outside the horizon r > 2M = {2 * self.mass}; "
                "the chart covers the exterior branch only")


@dataclass(frozen=True)
class KruskalPoint:
    u: float
    v: float

    @property
    def z(self) -> float:
        return self.u + self.v

    @property
    def t(self) -> float:
        return self.u - self.v


def to_kruskal(point: SchwarzschildPoint) -> KruskalPoint:
    """Chart map: u v = 16 M^2 (r/2M - 1) exp(r/2M - 1), u/v = exp(t/2M)."""
    m = point.mass
    rho = point.r / (2.0 * m)
    uv = 16.0 * m * m * (rho - 1.0) * math.exp(rho - 1.0)
    root = math.sqrt(uv)
    return KruskalPoint(u=root * math.exp(point.t / (4.0 * m)),
                        v=root * math.exp(-point.t / (4.0 * m)))


def from_kruskal(point: KruskalPoint, mass: float) -> SchwarzschildPoint:
    """Inverse chart map on the exterior branch (u, v > 0), via the Lambert W
    function."""
    if mass <= 0.0:
        raise ValueError("mass must be positive")
    if point.u <= 0.0 or point.v <= 0.0:
        raise ValueError("exterior branch requires u > 0 and v > 0")
    uv = point.u * point.v
    w = float(lambertw(uv / (16.0 * mass * mass)).real)
    r = 2.0 * mass * (1.0 + w)
    t = 2.0 * mass * math.log(point.u / point.v)
    return SchwarzschildPoint(r=r, t=t, mass=mass)
