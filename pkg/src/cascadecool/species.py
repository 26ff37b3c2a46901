"""Atomic species data, physical constants and derived scales.

Species records are read from a small ``key = value`` text file with one
``[species]`` block per atom.  Linewidths are tabulated as Gamma/2pi in MHz
and converted to angular frequencies on ingestion; everything held by a
:class:`Species` is SI.
"""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from scipy import constants as _const

HBAR = _const.hbar
KB = _const.k
AMU = _const.physical_constants["atomic mass constant"][0]

SPECIES_PATH_ENV = "CASCADE_COOL_SPECIES_PATH"

RECORD_KEYS = (
    "name",
    "mass_u",
    "lambda1_nm",
    "lambda2_nm",
    "gamma1_over_2pi_MHz",
    "gamma2_over_2pi_MHz",
)


class SpeciesError(ValueError):
    """Invalid or missing species data."""


@dataclass(frozen=True)
class Species:
    """Constants of a three-level cascade |0> -> |1> -> |2>.

    ``gamma1`` and ``gamma2`` are decay rates in rad/s.  ``gamma2 = 0`` is
    allowed for idealised studies (closed dark resonance); records read
    from a data file must have both rates strictly positive.
    """

    name: str
    mass: float
    lambda1: float
    lambda2: float
    gamma1: float
    gamma2: float
    k1: float = field(init=False)
    k2: float = field(init=False)

    def __post_init__(self):
        for key in ("mass", "lambda1", "lambda2", "gamma1"):
            value = getattr(self, key)
            if not math.isfinite(value) or value <= 0:
                raise SpeciesError(f"{self.name}: {key} must be positive, got {value!r}")
        if not math.isfinite(self.gamma2) or self.gamma2 < 0:
            raise SpeciesError(f"{self.name}: gamma2 must be non-negative, got {self.gamma2!r}")
        object.__setattr__(self, "k1", 2 * math.pi / self.lambda1)
        object.__setattr__(self, "k2", 2 * math.pi / self.lambda2)

    @property
    def doppler_limit1(self) -> float:
        return doppler_limit(self.gamma1)

    @property
    def doppler_limit2(self) -> float:
        return doppler_limit(self.gamma2)

    def table_row(self) -> dict[str, float]:
        """Line data in the tabulated units (nm, MHz, mK, uK)."""
        return {
            "lambda1_nm": self.lambda1 * 1e9,
            "gamma1_over_2pi_MHz": self.gamma1 / (2 * math.pi) / 1e6,
            "T_D1_mK": self.doppler_limit1 * 1e3,
            "lambda2_nm": self.lambda2 * 1e9,
            "gamma2_over_2pi_MHz": self.gamma2 / (2 * math.pi) / 1e6,
            "T_D2_uK": self.doppler_limit2 * 1e6,
            "mass_u": self.mass / AMU,
        }


@dataclass(frozen=True)
class EmissionGeometry:
    """Second moments of the two spontaneous-emission patterns along the cooling axis."""

    chi1: float = 1.0
    chi2: float = 1.0

    def __post_init__(self):
        for key in ("chi1", "chi2"):
            value = getattr(self, key)
            if not (0.0 <= value <= 1.0):
                raise ValueError(f"{key} must lie in [0, 1], got {value!r}")


DIPOLE = EmissionGeometry(0.4, 0.4)
THREE_D = EmissionGeometry(1.0, 1.0)


def doppler_limit(gamma: float) -> float:
    """Two-level Doppler temperature hbar*gamma/(2 k_B) in kelvin (gamma in rad/s)."""
    if gamma <= 0:
        raise ValueError(f"gamma must be positive, got {gamma!r}")
    return HBAR * gamma / (2 * KB)


@dataclass(frozen=True)
class NaturalUnits:
    """Internal scales: frequency gamma1, velocity gamma1/k1, energy hbar*gamma1."""

    frequency: float
    velocity: float
    energy: float
    time: float
    momentum: float

    def to_frequency(self, x):
        return x / self.frequency

    def from_frequency(self, x):
        return x * self.frequency

    def to_velocity(self, v):
        return v / self.velocity

    def from_velocity(self, v):
        return v * self.velocity

    def to_energy(self, e):
        return e / self.energy

    def from_energy(self, e):
        return e * self.energy


def natural_units(species: Species) -> NaturalUnits:
    velocity = species.gamma1 / species.k1
    return NaturalUnits(
        frequency=species.gamma1,
        velocity=velocity,
        energy=HBAR * species.gamma1,
        time=1.0 / species.gamma1,
        momentum=species.mass * velocity,
    )


# -- data file ---------------------------------------------------------------

def parse_species_file(text: str, source: str = "<string>") -> list[dict[str, str]]:
    """Split a species data file into raw ``key -> literal`` records."""
    records: list[dict[str, str]] = []
    current: dict[str, str] | None = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line == "[species]":
            current = {}
            records.append(current)
            continue
        if current is None:
            raise SpeciesError(f"{source}:{lineno}: entry outside a [species] block")
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise SpeciesError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        if key not in RECORD_KEYS:
            raise SpeciesError(f"{source}:{lineno}: unknown key {key!r}")
        if key in current:
            raise SpeciesError(f"{source}:{lineno}: duplicate key {key!r}")
        current[key] = value
    return records


def species_from_record(record: Mapping[str, str]) -> Species:
    """Validate one raw record and convert it to SI."""
    name = record.get("name", "").strip()
    label = name or "<unnamed>"
    for key in RECORD_KEYS:
        if key not in record or not str(record[key]).strip():
            raise SpeciesError(f"{label}: missing field {key!r}")
    values = {}
    for key in RECORD_KEYS[1:]:
        try:
            value = float(record[key])
        except ValueError:
            raise SpeciesError(f"{label}: field {key!r} is not a number: {record[key]!r}") from None
        if not math.isfinite(value) or value <= 0:
            raise SpeciesError(f"{label}: field {key!r} must be positive, got {record[key]!r}")
        values[key] = value
    return Species(
        name=name,
        mass=values["mass_u"] * AMU,
        lambda1=values["lambda1_nm"] * 1e-9,
        lambda2=values["lambda2_nm"] * 1e-9,
        gamma1=2 * math.pi * values["gamma1_over_2pi_MHz"] * 1e6,
        gamma2=2 * math.pi * values["gamma2_over_2pi_MHz"] * 1e6,
    )


def species_data_text(path: str | os.PathLike | None = None) -> tuple[str, str]:
    """Return ``(text, source)`` of the species file in effect.

    Explicit ``path`` wins, then ``$CASCADE_COOL_SPECIES_PATH``, then the
    bundled file.
    """
    path = path or os.environ.get(SPECIES_PATH_ENV)
    if path:
        p = Path(path)
        try:
            return p.read_text(), str(p)
        except FileNotFoundError:
            raise SpeciesError(f"species file not found: {p}") from None
    bundled = resources.files("cascadecool").joinpath("data/species.dat")
    return bundled.read_text(), "bundled species.dat"


def load_all(path: str | os.PathLike | None = None) -> dict[str, Species]:
    text, source = species_data_text(path)
    out: dict[str, Species] = {}
    for record in parse_species_file(text, source):
        sp = species_from_record(record)
        if sp.name in out:
            raise SpeciesError(f"{source}: species {sp.name!r} defined twice")
        out[sp.name] = sp
    return out


def load_species(source: str | Mapping[str, str], path: str | os.PathLike | None = None) -> Species:
    """Load a species by preset name, or validate a raw record mapping."""
    if isinstance(source, Mapping):
        return species_from_record(source)
    table = load_all(path)
    try:
        return table[source]
    except KeyError:
        known = ", ".join(sorted(table))
        raise SpeciesError(f"unknown species {source!r} (known: {known})") from None
