"""Velocity-dependent scattering rates, absorption spectra and the light force.

Two routes to the lower-transition rate are provided:

* ``rate_r1_obe`` -- from the steady-state populations,
  R1 = gamma1*rho11 - gamma2*rho22, R2 = gamma2*rho22;
* ``rate_r1_perturbative`` -- the closed-form weak-probe expression.

All rates are for the +x beam pair; the -x pair is the same call at -v.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .bloch import LaserConfig, liouvillian, liouvillian_at, solve_steady
from .species import HBAR, Species

WEAK_PROBE_LIMIT = 0.05
DEFAULT_POINTS = 401
# |delta1| beyond this many gamma1 counts as the two-photon (far-detuned) regime.
TWO_PHOTON_DETUNING = 10.0


@dataclass(frozen=True)
class RatePoint:
    v: float
    r1: float
    r2: float


@dataclass(frozen=True, eq=False)
class RateProfile:
    grid: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    species: Species
    lasers: LaserConfig
    force: np.ndarray | None = None

    def __post_init__(self):
        if self.grid.ndim != 1 or np.any(np.diff(self.grid) <= 0):
            raise ValueError("velocity grid must be one-dimensional and strictly increasing")

    @property
    def points(self) -> list[RatePoint]:
        return [RatePoint(float(v), float(a), float(b)) for v, a, b in zip(self.grid, self.r1, self.r2)]


@dataclass(frozen=True, eq=False)
class Spectrum:
    delta1: np.ndarray
    r1: np.ndarray
    species: Species
    lasers: LaserConfig


def rates_obe(species: Species, lasers: LaserConfig, v):
    """(R1, R2) in 1/s at velocity ``v`` (scalar or array, m/s)."""
    rho = solve_steady(liouvillian(species, lasers, v))
    p1 = rho[..., 1, 1].real
    p2 = rho[..., 2, 2].real
    r2 = species.gamma2 * p2
    r1 = species.gamma1 * p1 - r2
    if np.ndim(v) == 0:
        return float(r1), float(r2)
    return r1, r2


def rate_r1_obe(species: Species, lasers: LaserConfig, v):
    return rates_obe(species, lasers, v)[0]


def rate_r2_obe(species: Species, lasers: LaserConfig, v):
    return rates_obe(species, lasers, v)[1]


def rate_r1_perturbative(species: Species, lasers: LaserConfig, v):
    """Weak-probe lower-transition rate with Doppler-shifted detunings.

    (g1 W1^2 / 8) |z / (z (d1' + i g1/2) - W2^2/4)|^2,  z = d1' + d2' + i g2/2
    """
    if lasers.omega_rabi1 > WEAK_PROBE_LIMIT * species.gamma1:
        warnings.warn("omega_rabi1 above 0.05*gamma1: weak-probe rate is outside its validity", stacklevel=2)
    g1, g2 = species.gamma1, species.gamma2
    v = np.asarray(v, dtype=float)
    # natural units keep the squared denominators well inside double range
    d1 = (lasers.delta1 - species.k1 * v) / g1
    d2 = (lasers.delta2 - species.k2 * v) / g1
    w1, w2 = lasers.omega_rabi1 / g1, lasers.omega_rabi2 / g1
    lower = d1 + 0.5j
    z = d1 + d2 + 0.5j * g2 / g1
    if w2 == 0:
        amp = 1.0 / lower
    else:
        # rewritten as 1/(lower - w2^2/(4 z)); exact zero on the dark resonance z = 0
        with np.errstate(divide="ignore", invalid="ignore"):
            amp = np.where(z == 0, 0.0, 1.0 / (lower - w2**2 / (4 * np.where(z == 0, 1.0, z))))
    out = g1 * w1**2 / 8 * np.abs(amp) ** 2
    return float(out) if out.ndim == 0 else out


def absorption_spectrum(species: Species, lasers: LaserConfig, delta1_grid) -> Spectrum:
    """Lower-transition rate at v = 0 as a function of delta1 (rad/s); raw rates."""
    grid = np.asarray(delta1_grid, dtype=float)
    rho = solve_steady(liouvillian_at(species, lasers.omega_rabi1, lasers.omega_rabi2, grid, lasers.delta2))
    r1 = species.gamma1 * rho[..., 1, 1].real - species.gamma2 * rho[..., 2, 2].real
    return Spectrum(grid, r1, species, lasers)


def force(species: Species, lasers: LaserConfig, v):
    """Semiclassical force (N) from both beam pairs; antisymmetric in v by construction."""
    v = np.asarray(v, dtype=float)
    both = np.stack([v, -v])
    r1, r2 = rates_obe(species, lasers, both)
    f = HBAR * species.k1 * (r1[0] - r1[1]) + HBAR * (species.k1 + species.k2) * (r2[0] - r2[1])
    return float(f) if f.ndim == 0 else f


def force_profile(species: Species, lasers: LaserConfig, v_grid) -> np.ndarray:
    return np.asarray(force(species, lasers, np.asarray(v_grid, dtype=float)))


def default_velocity_grid(species: Species, lasers: LaserConfig, points: int = DEFAULT_POINTS) -> np.ndarray:
    """+-2 gamma1/k1 for near-resonant driving, +-4 gamma2/k2 in the two-photon regime."""
    if abs(lasers.delta1) >= TWO_PHOTON_DETUNING * species.gamma1 and species.gamma2 > 0:
        vmax = 4 * species.gamma2 / species.k2
    else:
        vmax = 2 * species.gamma1 / species.k1
    return np.linspace(-vmax, vmax, points)


def rate_profile(species: Species, lasers: LaserConfig, v_grid=None) -> RateProfile:
    grid = default_velocity_grid(species, lasers) if v_grid is None else np.asarray(v_grid, dtype=float)
    both = np.stack([grid, -grid])
    r1, r2 = rates_obe(species, lasers, both)
    f = HBAR * species.k1 * (r1[0] - r1[1]) + HBAR * (species.k1 + species.k2) * (r2[0] - r2[1])
    return RateProfile(grid, r1[0], r2[0], species, lasers, force=f)


def fit_perturbative_scale(species: Species, lasers: LaserConfig) -> float:
    """Ratio perturbative/OBE at delta1 = 0, v = 0 with the upper laser off.

    Frozen once and reused when comparing the two routes elsewhere.
    """
    ref = LaserConfig(lasers.omega_rabi1, 0.0, 0.0, 0.0)
    return rate_r1_perturbative(species, ref, 0.0) / rate_r1_obe(species, ref, 0.0)
