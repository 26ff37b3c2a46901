"""Parameter scans and grid-search optimisation over laser settings.

Every grid point is computed independently; with ``threads > 1`` points are
farmed out to a process pool and gathered back in grid order, so the
output does not depend on the worker count.
"""
from __future__ import annotations

import configparser
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bloch import LaserConfig, SingularSteadyStateError
from .cooling import ConvergenceError, CoolingReport, temperature
from .csvio import REPORT_COLUMNS, fmt, report_csv, report_fields
from .scattering import default_velocity_grid, force, rates_obe
from .species import EmissionGeometry, Species, load_species
from .units import parse_frequency, parse_range

AXES = ("delta1", "delta2", "two_photon", "omega2")
OUTPUTS = ("absorption", "alpha", "temperature", "force", "capture")
SCAN_EXTRA_COLUMNS = ("absorption_per_s", "F_peak_N", "error")
COMPUTATION_ERRORS = (ConvergenceError, SingularSteadyStateError, ArithmeticError, ValueError)


class ConfigError(ValueError):
    """Malformed scan or optimisation configuration."""


@dataclass(frozen=True)
class ScanSpec:
    species: Species
    fixed: LaserConfig
    axis: str
    start: float
    stop: float
    points: int
    outputs: tuple[str, ...] = ("absorption", "alpha", "temperature")
    geometry: EmissionGeometry = field(default_factory=EmissionGeometry)

    def __post_init__(self):
        if self.axis not in AXES:
            raise ConfigError(f"unknown scan axis {self.axis!r} (choose from {', '.join(AXES)})")
        if not self.start < self.stop:
            raise ConfigError("scan range needs start < stop")
        if self.points < 2:
            raise ConfigError("scan range needs at least 2 points")
        bad = set(self.outputs) - set(OUTPUTS)
        if bad:
            raise ConfigError(f"unknown outputs {sorted(bad)} (choose from {', '.join(OUTPUTS)})")

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)

    def lasers_at(self, value: float) -> LaserConfig:
        if self.axis == "two_photon":
            return replace(self.fixed, delta2=value - self.fixed.delta1)
        if self.axis == "omega2":
            return replace(self.fixed, omega_rabi2=value)
        return replace(self.fixed, **{self.axis: value})


@dataclass(frozen=True)
class OptimizeSpec:
    """Box search for the lowest temperature with alpha > 0.

    Each of ``delta1``, ``delta2``, ``omega2`` is a grid of values (rad/s);
    a single value pins that axis.
    """

    species: Species
    omega1: float
    delta1: tuple[float, ...]
    delta2: tuple[float, ...]
    omega2: tuple[float, ...]
    geometry: EmissionGeometry = field(default_factory=EmissionGeometry)

    def __post_init__(self):
        for name in ("delta1", "delta2", "omega2"):
            vals = getattr(self, name)
            if len(vals) == 0:
                raise ConfigError(f"{name}: empty axis")
            if len(vals) > 1 and (len(vals) < 3 or vals[0] >= vals[-1]):
                raise ConfigError(f"{name}: a ranged axis needs start < stop and at least 3 points")

    def lasers(self):
        for d1 in self.delta1:
            for d2 in self.delta2:
                for w2 in self.omega2:
                    yield LaserConfig(self.omega1, w2, d1, d2)


@dataclass
class ScanTable:
    axis: str
    columns: tuple[str, ...]
    rows: list[dict[str, str]]
    header: str

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(self.header.rstrip("\n") + "\n")
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            out.write(",".join(row.get(c, "") for c in self.columns) + "\n")
        return out.getvalue()


@dataclass
class OptimizeResult:
    best: CoolingReport | None
    frontier: str
    evaluated: int

    @property
    def found(self) -> bool:
        return self.best is not None


# -- per-point work --------------------------------------------------------------

def peak_force(species: Species, lasers: LaserConfig) -> float:
    """Signed force at the largest |F| over v > 0 on the default grid."""
    v = default_velocity_grid(species, lasers)
    v = v[v > 0]
    f = force(species, lasers, v)
    return float(f[np.argmax(np.abs(f))])


def point_row(species: Species, lasers: LaserConfig, geometry: EmissionGeometry, outputs) -> dict[str, str]:
    """One scan row in the report column layout; failures land in ``error``."""
    base = {
        "delta1": fmt(lasers.delta1),
        "delta2": fmt(lasers.delta2),
        "omega1": fmt(lasers.omega_rabi1),
        "omega2": fmt(lasers.omega_rabi2),
    }
    try:
        report = temperature(species, lasers, geometry, with_capture="capture" in outputs)
        row = report_fields(report)
        if "absorption" in outputs:
            row["absorption_per_s"] = fmt(rates_obe(species, lasers, 0.0)[0])
        if "force" in outputs:
            row["F_peak_N"] = fmt(peak_force(species, lasers))
        if "capture" in outputs and report.alpha > 0 and not report.capture_bounded:
            row["error"] = "capture range reached grid edge"
        return row
    except COMPUTATION_ERRORS as exc:
        base["error"] = f"{type(exc).__name__}: {exc}".replace(",", ";").replace("\n", " ")
        return base


def cooling_curve(species: Species, fixed: LaserConfig, axis: str, values, geometry=None) -> dict[str, np.ndarray]:
    """alpha, H0 and T (NaN where alpha <= 0) along one axis, computed serially."""
    spec = ScanSpec(species, fixed, axis, -1.0, 1.0, 2)  # only used for lasers_at
    values = np.asarray(values, dtype=float)
    alpha, heat, temp = (np.full(values.shape, np.nan) for _ in range(3))
    for i, x in enumerate(values):
        r = temperature(species, spec.lasers_at(float(x)), geometry, with_capture=False)
        alpha[i], heat[i] = r.alpha, r.heating
        if r.temperature is not None:
            temp[i] = r.temperature
    return {"values": values, "alpha": alpha, "heating": heat, "temperature": temp}


def _row_task(args):
    species, lasers, geometry, outputs = args
    return point_row(species, lasers, geometry, outputs)


def _map(tasks, threads: int):
    if threads <= 1 or len(tasks) < 2:
        return [_row_task(t) for t in tasks]
    chunk = max(1, len(tasks) // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_row_task, tasks, chunksize=chunk))


def axis_column(axis: str) -> str:
    return f"axis_{axis}"


def describe_scan(spec: ScanSpec) -> str:
    f = spec.fixed
    return (
        f"# scan species={spec.species.name} axis={spec.axis} start={fmt(spec.start)} stop={fmt(spec.stop)} "
        f"points={spec.points} omega1={fmt(f.omega_rabi1)} omega2={fmt(f.omega_rabi2)} "
        f"delta1={fmt(f.delta1)} delta2={fmt(f.delta2)} chi1={spec.geometry.chi1!r} chi2={spec.geometry.chi2!r} "
        f"outputs={'|'.join(spec.outputs)} units=rad/s"
    )


def run_scan(spec: ScanSpec, threads: int = 1) -> ScanTable:
    tasks = [(spec.species, spec.lasers_at(x), spec.geometry, spec.outputs) for x in spec.values]
    rows = _map(tasks, threads)
    key = axis_column(spec.axis)
    for x, row in zip(spec.values, rows):
        row[key] = fmt(x)
    columns = (key,) + REPORT_COLUMNS + SCAN_EXTRA_COLUMNS
    return ScanTable(spec.axis, columns, rows, describe_scan(spec))


def run_optimize(spec: OptimizeSpec, threads: int = 1) -> OptimizeResult:
    """Exhaustive grid search; ties go to the lowest delta1, then delta2, then omega2 index."""
    lasers = list(spec.lasers())
    tasks = [(spec.species, las, spec.geometry, ()) for las in lasers]
    rows = _map(tasks, threads)
    best_i, best_t = None, None
    for i, row in enumerate(rows):
        if row.get("regime") != "cooling" or not row.get("T_kelvin"):
            continue
        t = float(row["T_kelvin"])
        if best_t is None or t < best_t:
            best_i, best_t = i, t
    header = (
        f"# optimize species={spec.species.name} omega1={fmt(spec.omega1)} "
        f"delta1={fmt(spec.delta1[0])}:{fmt(spec.delta1[-1])}:{len(spec.delta1)} "
        f"delta2={fmt(spec.delta2[0])}:{fmt(spec.delta2[-1])}:{len(spec.delta2)} "
        f"omega2={fmt(spec.omega2[0])}:{fmt(spec.omega2[-1])}:{len(spec.omega2)} "
        f"chi1={spec.geometry.chi1!r} chi2={spec.geometry.chi2!r} units=rad/s"
    )
    columns = REPORT_COLUMNS + ("error",)
    frontier = ScanTable("", columns, rows, header).to_csv()
    best = None
    if best_i is not None:
        best = temperature(spec.species, lasers[best_i], spec.geometry, with_capture=True)
    return OptimizeResult(best, frontier, len(rows))


# -- config files ----------------------------------------------------------------

def _read_config(path) -> configparser.ConfigParser:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    cp.optionxform = str
    if not os.path.isfile(path):
        raise FileNotFoundError(f"config file not found: {path}")
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return cp


def _section(cp, name, path):
    if not cp.has_section(name):
        raise ConfigError(f"{path}: missing [{name}] section")
    return cp[name]


def _geometry(sec) -> EmissionGeometry:
    return EmissionGeometry(float(sec.get("chi1", "1")), float(sec.get("chi2", "1")))


def _freq(sec, key, species, default="0"):
    return parse_frequency(sec.get(key, default), species)


_SCAN_KEYS = {"species", "omega1", "omega2", "delta1", "delta2", "axis", "range", "outputs", "chi1", "chi2"}
_OPT_KEYS = {"species", "omega1", "omega2", "delta1", "delta2", "grid", "chi1", "chi2"}


def _check_keys(sec, allowed, path):
    extra = set(sec) - allowed
    if extra:
        raise ConfigError(f"{path}: unknown keys {sorted(extra)}")


def load_scan_spec(path, species_path=None) -> ScanSpec:
    cp = _read_config(path)
    sec = _section(cp, "scan", path)
    _check_keys(sec, _SCAN_KEYS, path)
    try:
        species = load_species(sec.get("species", "Mg"), species_path)
        fixed = LaserConfig(
            _freq(sec, "omega1", species, "0.01g1"),
            _freq(sec, "omega2", species),
            _freq(sec, "delta1", species),
            _freq(sec, "delta2", species),
        )
        if "range" not in sec or "axis" not in sec:
            raise ConfigError(f"{path}: [scan] needs 'axis' and 'range'")
        start, stop, points = parse_range(sec["range"], species)
        outputs = tuple(o.strip() for o in sec.get("outputs", "absorption, alpha, temperature").split(",") if o.strip())
        return ScanSpec(species, fixed, sec["axis"].strip(), start, stop, points, outputs, _geometry(sec))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _axis_values(text, species, grid) -> tuple[float, ...]:
    if ":" in text:
        start, stop, points = parse_range(text, species, default_points=grid)
        return tuple(float(x) for x in np.linspace(start, stop, points))
    return (parse_frequency(text, species),)


def load_optimize_spec(path, species_path=None) -> OptimizeSpec:
    cp = _read_config(path)
    sec = _section(cp, "optimize", path)
    _check_keys(sec, _OPT_KEYS, path)
    try:
        species = load_species(sec.get("species", "Mg"), species_path)
        grid = int(sec.get("grid", "21"))
        if grid < 3:
            raise ConfigError(f"{path}: grid must be at least 3")
        return OptimizeSpec(
            species,
            _freq(sec, "omega1", species, "0.01g1"),
            _axis_values(sec.get("delta1", "0"), species, grid),
            _axis_values(sec.get("delta2", "0"), species, grid),
            _axis_values(sec.get("omega2", "0"), species, grid),
            _geometry(sec),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def optimize_summary(result: OptimizeResult) -> str:
    if not result.found:
        return f"no cooling found ({result.evaluated} points evaluated)\n"
    b = result.best
    g1, g2 = b.species.gamma1, b.species.gamma2
    return "\n".join([
        f"best of {result.evaluated} points:",
        f"  delta1 = {b.lasers.delta1 / g1:.6g} gamma1",
        f"  delta2 = {b.lasers.delta2 / g2:.6g} gamma2",
        f"  omega2 = {b.lasers.omega_rabi2 / g2:.6g} gamma2",
        f"  T      = {b.temperature * 1e3:.6g} mK",
        f"  alpha  = {b.alpha:.6g} 1/s",
    ]) + "\n" + report_csv([b])
