"""Steady state of the driven, damped three-level cascade.

The density matrix is evolved by a Lindblad generator in the frame rotating
at the two laser frequencies (rotating-wave approximation).  Internally all
frequencies are measured in units of gamma1; the generator matrix acts on
the row-major vectorisation of rho.

A moving atom is handled by Doppler-shifting the detunings of one
co-propagating beam pair travelling along +x:

    delta1' = delta1 - k1 v,    delta2' = delta2 - k2 v.

The counter-propagating pair is the same problem evaluated at -v.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .species import Species

N_LEVELS = 3
DIM = N_LEVELS * N_LEVELS
SATURATION_THRESHOLD = 0.1
# Replaced-row systems above this condition number are treated as singular.
MAX_CONDITION = 1e12
SPEED_GUARD = 299792458.0 / 100


class SingularSteadyStateError(ArithmeticError):
    """Steady state is non-unique or numerically ill-conditioned."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


@dataclass(frozen=True)
class LaserConfig:
    """Rabi frequencies and detunings of the two lasers, all in rad/s.

    ``delta1`` detunes laser 1 from |0>-|1>; ``delta2`` detunes laser 2 from
    |1>-|2>, so ``delta1 + delta2`` is the two-photon detuning.
    """

    omega_rabi1: float
    omega_rabi2: float = 0.0
    delta1: float = 0.0
    delta2: float = 0.0

    def __post_init__(self):
        for key in ("omega_rabi1", "omega_rabi2", "delta1", "delta2"):
            object.__setattr__(self, key, float(getattr(self, key)))
            if not math.isfinite(getattr(self, key)):
                raise ValueError(f"{key} must be finite")
        if self.omega_rabi1 < 0 or self.omega_rabi2 < 0:
            raise ValueError("Rabi frequencies must be non-negative")

    @classmethod
    def in_linewidths(cls, species: Species, omega1=0.0, omega2=0.0, delta1=0.0, delta2=0.0):
        """Build from dimensionless values: omega1, delta1 in gamma1; omega2, delta2 in gamma2."""
        g1, g2 = species.gamma1, species.gamma2
        return cls(omega1 * g1, omega2 * g2, delta1 * g1, delta2 * g2)

    @property
    def two_photon_detuning(self) -> float:
        return self.delta1 + self.delta2


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    rho: np.ndarray

    @property
    def populations(self) -> tuple[float, float, float]:
        return populations(self)

    @property
    def saturated(self) -> bool:
        return bool(self.rho[1, 1].real > SATURATION_THRESHOLD)


@dataclass(frozen=True, eq=False)
class Generator:
    """Lindblad generator in natural units (time measured in 1/gamma1)."""

    matrix: np.ndarray
    species: Species
    lasers: LaserConfig
    velocity: float

    def apply(self, rho: np.ndarray) -> np.ndarray:
        """d(rho)/dt in units of gamma1."""
        return (self.matrix @ np.asarray(rho, dtype=complex).reshape(DIM)).reshape(N_LEVELS, N_LEVELS)


def _superop_left_right(a, b):
    # Row-major vec: vec(A X B) = kron(A, B^T) vec(X); broadcast over leading axes.
    out = np.einsum("...ij,...kl->...ikjl", a, np.swapaxes(b, -1, -2))
    return out.reshape(out.shape[:-4] + (DIM, DIM))


def _dissipator(g1: float, g2: float) -> np.ndarray:
    eye = np.eye(N_LEVELS)
    d = np.zeros((DIM, DIM), dtype=complex)
    for rate, low, high in ((g1, 0, 1), (g2, 1, 2)):
        if rate == 0:
            continue
        c = np.zeros((N_LEVELS, N_LEVELS))
        c[low, high] = math.sqrt(rate)
        cdc = c.T @ c
        d += _superop_left_right(c, c.T) - 0.5 * _superop_left_right(cdc, eye) - 0.5 * _superop_left_right(eye, cdc)
    return d


def _hamiltonian(omega1, omega2, d1, d2):
    """Rotating-frame Hamiltonian / hbar; d1, d2 may be arrays (Doppler-shifted)."""
    d1, d2 = np.broadcast_arrays(np.asarray(d1, dtype=float), np.asarray(d2, dtype=float))
    h = np.zeros(d1.shape + (N_LEVELS, N_LEVELS), dtype=complex)
    h[..., 0, 1] = h[..., 1, 0] = omega1 / 2
    h[..., 1, 2] = h[..., 2, 1] = omega2 / 2
    h[..., 1, 1] = -d1
    h[..., 2, 2] = -(d1 + d2)
    return h


def liouvillian_at(species: Species, omega1: float, omega2: float, d1, d2) -> np.ndarray:
    """Generator matrices for (possibly arrays of) effective detunings d1, d2 in rad/s."""
    g = species.gamma1
    h = _hamiltonian(omega1 / g, omega2 / g, np.asarray(d1, dtype=float) / g, np.asarray(d2, dtype=float) / g)
    eye = np.broadcast_to(np.eye(N_LEVELS), h.shape)
    coherent = -1j * (_superop_left_right(h, eye) - _superop_left_right(eye, h))
    return coherent + _dissipator(1.0, species.gamma2 / g)


def liouvillian(species: Species, lasers: LaserConfig, v) -> np.ndarray:
    """Generator matrices in natural units, one per entry of ``v`` (m/s)."""
    v = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(v)):
        raise ValueError("velocity must be finite")
    if np.any(np.abs(v) > SPEED_GUARD):
        raise ValueError("velocity exceeds the non-relativistic guard c/100")
    return liouvillian_at(
        species,
        lasers.omega_rabi1,
        lasers.omega_rabi2,
        lasers.delta1 - species.k1 * v,
        lasers.delta2 - species.k2 * v,
    )


def build_generator(species: Species, lasers: LaserConfig, v: float) -> Generator:
    v = float(v)
    return Generator(liouvillian(species, lasers, v), species, lasers, v)


_TRACE_ROW = np.eye(N_LEVELS).reshape(DIM)


def solve_steady(matrices: np.ndarray) -> np.ndarray:
    """Steady states for a stack of generators, shape (..., 3, 3).

    The |0><0| row of each singular system is replaced by the trace
    condition and the resulting nonsingular system solved directly.
    """
    a = np.array(matrices, dtype=complex, copy=True)
    a[..., 0, :] = _TRACE_ROW
    b = np.zeros(a.shape[:-1], dtype=complex)
    b[..., 0] = 1.0
    cond = np.linalg.cond(a)
    worst = np.max(cond) if cond.size else 0.0
    if not np.isfinite(worst) or worst > MAX_CONDITION:
        raise SingularSteadyStateError(
            f"steady-state system is singular or ill-conditioned (condition number {worst:.3g})",
            condition=worst,
        )
    x = np.linalg.solve(a, b[..., None])[..., 0]
    rho = x.reshape(x.shape[:-1] + (N_LEVELS, N_LEVELS))
    return 0.5 * (rho + np.conj(np.swapaxes(rho, -1, -2)))


def steady_state(gen: Generator) -> DensityMatrix:
    return DensityMatrix(solve_steady(gen.matrix))


def steady_populations(species: Species, lasers: LaserConfig, v) -> np.ndarray:
    """Populations (p0, p1, p2) along the last axis for each velocity in ``v``."""
    rho = solve_steady(liouvillian(species, lasers, v))
    return np.real(np.diagonal(rho, axis1=-2, axis2=-1))


def populations(rho: DensityMatrix) -> tuple[float, float, float]:
    p = np.real(np.diag(rho.rho))
    return float(p[0]), float(p[1]), float(p[2])
