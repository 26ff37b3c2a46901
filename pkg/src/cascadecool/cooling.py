"""Cooling rate, heating rate, temperature and capture range.

Near p = 0 the mean kinetic energy obeys

    d<E>/dt = -2 alpha <E> + H0,

with alpha = -2 hbar k1 R1'(0) - 2 hbar (k1 + k2) R2'(0) and H0 the recoil
heating evaluated with the rates at rest, so k_B T = H0 / alpha.  The full
(non-linearised) energy equation is integrated under a Gaussian momentum
distribution in :func:`evolve_energy_full`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .bloch import LaserConfig, steady_populations
from .scattering import default_velocity_grid, force, rates_obe
from .species import HBAR, KB, EmissionGeometry, Species

BASE_STEP = 1e-3  # k1 * h / M in units of gamma1
DERIVATIVE_RTOL = 1e-3
MAX_HALVINGS = 6
CAPTURE_FRACTION = 0.1
CAPTURE_RTOL = 1e-3
QUADRATURE_ORDER = 40
QUADRATURE_RTOL = 1e-6


class ConvergenceError(ArithmeticError):
    """A derivative or quadrature estimate failed its self-consistency check."""


@dataclass(frozen=True)
class CaptureRange:
    velocity: float
    bounded: bool
    criterion: str  # "sign", "threshold" or "edge"


@dataclass(frozen=True, eq=False)
class CoolingReport:
    species: Species
    lasers: LaserConfig
    geometry: EmissionGeometry
    alpha: float
    alpha_error: float
    heating: float
    temperature: float | None
    regime: str
    capture_range: float | None
    capture_bounded: bool
    saturation_warning: bool

    @property
    def steady_energy(self) -> float:
        return self.heating / (2 * self.alpha)


# -- derivatives --------------------------------------------------------------

def richardson_derivative(func, h: float, rtol: float = DERIVATIVE_RTOL, max_halvings: int = MAX_HALVINGS):
    """Derivative at 0 of a vectorised function by extrapolated central differences.

    ``func`` maps an array of abscissae of shape (n,) to values of shape
    (..., n).  Two Richardson estimates, from steps (h, h/2) and (h/2, h/4),
    must agree to ``rtol``; otherwise h is halved, at most ``max_halvings``
    times.  Returns ``(derivative, error_estimate)``.
    """
    last = None
    for _ in range(max_halvings + 1):
        steps = np.array([h, h / 2, h / 4])
        x = np.concatenate([steps, -steps])
        y = np.asarray(func(x), dtype=float)
        central = (y[..., :3] - y[..., 3:]) / (2 * steps)
        coarse = (4 * central[..., 1] - central[..., 0]) / 3
        fine = (4 * central[..., 2] - central[..., 1]) / 3
        err = np.abs(fine - coarse)
        # roundoff floor: values known to ~1e-9 relative cannot resolve slopes below this
        floor = 1e-9 * np.max(np.abs(y), axis=-1) / h
        if np.all((err <= rtol * np.abs(fine)) | (err <= floor)):
            return fine, err
        last = (coarse, fine)
        h /= 2
    raise ConvergenceError(
        f"derivative did not converge after {max_halvings} halvings: estimates {last[0]} vs {last[1]}"
    )


def _velocity_step(species: Species) -> float:
    return BASE_STEP * species.gamma1 / species.k1


def _rate_derivatives(species: Species, lasers: LaserConfig):
    """d(R1, R2)/dp at p = 0 in 1/(s kg m/s) with error estimates."""

    def both(v):
        r1, r2 = rates_obe(species, lasers, v)
        return np.stack([r1, r2])

    dv, err = richardson_derivative(both, _velocity_step(species))
    return dv / species.mass, err / species.mass


def rate_derivative_at_zero(species: Species, lasers: LaserConfig, which: str = "R1"):
    """(dR/dp at p = 0, error estimate) for ``which`` in {"R1", "R2"}."""
    index = {"R1": 0, "R2": 1}[which.upper()]

    def one(v):
        return rates_obe(species, lasers, v)[index]

    dv, err = richardson_derivative(one, _velocity_step(species))
    return float(dv) / species.mass, float(err) / species.mass


def _alpha_with_error(species: Species, lasers: LaserConfig):
    d, e = _rate_derivatives(species, lasers)
    k1, k12 = species.k1, species.k1 + species.k2
    alpha = -2 * HBAR * k1 * d[0] - 2 * HBAR * k12 * d[1]
    return float(alpha), float(2 * HBAR * k1 * e[0] + 2 * HBAR * k12 * e[1])


def cooling_rate(species: Species, lasers: LaserConfig) -> float:
    """Energy damping rate alpha in 1/s; positive means cooling."""
    return _alpha_with_error(species, lasers)[0]


# -- heating and temperature ----------------------------------------------------

def heating_from_rates(species: Species, geometry: EmissionGeometry, sigma1, sigma2):
    """Recoil heating (W) for mean rates sigma1, sigma2 (1/s)."""
    recoil1 = (1 + geometry.chi1) * HBAR**2 * species.k1**2 / species.mass
    recoil2 = (1 + geometry.chi2) * HBAR**2 * species.k2**2 / species.mass
    return sigma1 * recoil1 + 2 * sigma2 * (recoil1 + recoil2)


def heating_rate(species: Species, lasers: LaserConfig, geometry: EmissionGeometry) -> float:
    r1, r2 = rates_obe(species, lasers, 0.0)
    return float(heating_from_rates(species, geometry, r1, r2))


def temperature(
    species: Species,
    lasers: LaserConfig,
    geometry: EmissionGeometry | None = None,
    with_capture: bool = True,
) -> CoolingReport:
    geometry = geometry or EmissionGeometry()
    alpha, alpha_err = _alpha_with_error(species, lasers)
    heat = heating_rate(species, lasers, geometry)
    p1 = float(steady_populations(species, lasers, 0.0)[1])
    if alpha > 0:
        regime, temp = "cooling", heat / (KB * alpha)
    else:
        regime, temp = ("heating" if alpha < 0 else "neutral"), None
    capture, bounded = None, False
    if with_capture and alpha > 0:
        cr = capture_range(species, lasers)
        capture, bounded = cr.velocity, cr.bounded
    return CoolingReport(
        species=species,
        lasers=lasers,
        geometry=geometry,
        alpha=alpha,
        alpha_error=alpha_err,
        heating=heat,
        temperature=temp,
        regime=regime,
        capture_range=capture,
        capture_bounded=bounded,
        saturation_warning=p1 > 0.1,
    )


# -- energy dynamics -----------------------------------------------------------

def evolve_energy_linear(report: CoolingReport, e0: float, t):
    """Closed-form solution of the linearised energy equation (J)."""
    if report.alpha == 0:
        raise ValueError("linearised evolution needs a non-zero cooling rate")
    e_inf = report.heating / (2 * report.alpha)
    t = np.asarray(t, dtype=float)
    out = e_inf + (e0 - e_inf) * np.exp(-2 * report.alpha * t)
    return float(out) if out.ndim == 0 else out


def _energy_rhs_factory(species: Species, lasers: LaserConfig, geometry: EmissionGeometry, order: int):
    x, w = np.polynomial.hermite.hermgauss(order)
    w = w / math.sqrt(math.pi)
    k1, k12, mass = species.k1, species.k1 + species.k2, species.mass

    def rhs(energy: float) -> tuple[float, float]:
        # p ~ N(0, 2 M E)  =>  p = 2 sqrt(M E) x  with Hermite weight exp(-x^2)
        p = 2 * math.sqrt(mass * max(energy, 0.0)) * x
        v = p / mass
        r1, r2 = rates_obe(species, lasers, np.stack([v, -v]))
        f = HBAR * k1 * (r1[0] - r1[1]) + HBAR * k12 * (r2[0] - r2[1])
        drift = float(np.sum(w * v * f))
        heat = float(heating_from_rates(species, geometry, np.sum(w * r1[0]), np.sum(w * r2[0])))
        return drift, heat

    return rhs


def _quadrature_agrees(species, lasers, geometry, order, energy) -> bool:
    a = _energy_rhs_factory(species, lasers, geometry, order)(energy)
    b = _energy_rhs_factory(species, lasers, geometry, 2 * order)(energy)
    scale = abs(b[0]) + abs(b[1])
    return abs((a[0] + a[1]) - (b[0] + b[1])) <= QUADRATURE_RTOL * scale or scale == 0


def evolve_energy_full(
    species: Species,
    lasers: LaserConfig,
    geometry: EmissionGeometry | None,
    e0: float,
    t_grid,
    order: int = QUADRATURE_ORDER,
    rtol: float = 1e-8,
) -> np.ndarray:
    """Mean kinetic energy (J) at ``t_grid`` from the full energy equation.

    The momentum distribution is taken Gaussian with variance 2 M <E>;
    drift and mean rates are Gauss-Hermite sums.  The quadrature order is
    checked against twice itself at the start and end of the run and
    doubled once if needed.
    """
    if e0 <= 0:
        raise ValueError("initial energy must be positive")
    geometry = geometry or EmissionGeometry()
    t_grid = np.asarray(t_grid, dtype=float)

    def integrate(n):
        rhs = _energy_rhs_factory(species, lasers, geometry, n)

        def f(_t, y):
            drift, heat = rhs(y[0] * e0)
            return [(drift + heat) / e0]

        sol = solve_ivp(f, (0.0, float(t_grid[-1])), [1.0], method="RK45", t_eval=t_grid,
                        rtol=rtol, atol=1e-12)
        if not sol.success:
            raise ConvergenceError(f"energy integration failed: {sol.message}")
        return sol.y[0] * e0

    n = order
    for attempt in range(2):
        if not _quadrature_agrees(species, lasers, geometry, n, e0):
            if attempt:
                break
            n *= 2
            continue
        energies = integrate(n)
        if _quadrature_agrees(species, lasers, geometry, n, float(energies[-1])):
            return energies
        if attempt:
            break
        n *= 2
    raise ConvergenceError(f"Gauss-Hermite quadrature not converged at order {n}")


# -- capture range ---------------------------------------------------------------

def _bisect(pred, lo: float, hi: float, rtol: float = CAPTURE_RTOL) -> float:
    """Boundary between pred(lo) False and pred(hi) True."""
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def capture_range(species: Species, lasers: LaserConfig, v_grid=None) -> CaptureRange:
    """Half-width of the velocity window in which the force damps the motion.

    The window ends at the first v > 0 where either the force stops opposing
    the motion, or, past the peak damping force, |F| drops below 10 % of the
    largest |F| on the grid.  Both are located on the grid and refined by
    bisection.
    """
    grid = default_velocity_grid(species, lasers) if v_grid is None else np.asarray(v_grid, dtype=float)
    v = grid[grid > 0]
    if v.size == 0:
        raise ValueError("velocity grid has no positive points")
    f = force(species, lasers, v)
    fmax = float(np.max(np.abs(f)))
    candidates = []

    antidamping = np.nonzero(v * f >= 0)[0]
    stop = antidamping[0] if antidamping.size else v.size
    if antidamping.size:
        i = antidamping[0]
        lo = v[i - 1] if i > 0 else 0.0
        candidates.append((_bisect(lambda u: u * force(species, lasers, u) >= 0, lo, v[i]), "sign"))

    if stop > 0:
        peak = int(np.argmax(np.abs(f[:stop])))
        below = np.nonzero(np.abs(f[peak:stop]) < CAPTURE_FRACTION * fmax)[0]
        if below.size:
            i = peak + below[0]
            threshold = CAPTURE_FRACTION * fmax
            candidates.append(
                (_bisect(lambda u: abs(force(species, lasers, u)) < threshold, v[i - 1] if i > 0 else 0.0, v[i]),
                 "threshold")
            )

    if not candidates:
        return CaptureRange(float(v[-1]), False, "edge")
    value, criterion = min(candidates)
    return CaptureRange(float(value), True, criterion)
