"""CSV emitters for rate profiles, spectra and cooling reports."""
from __future__ import annotations

import io
import math

from .bloch import LaserConfig
from .cooling import CoolingReport
from .scattering import RateProfile, Spectrum

REPORT_COLUMNS = (
    "delta1", "delta2", "omega1", "omega2",
    "alpha_per_s", "H_watt", "T_kelvin", "regime", "capture_mps", "saturated",
)


def fmt(x) -> str:
    """17 significant digits, so every float round-trips exactly."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return ""
    return f"{x:.16e}"


def laser_header(species_name: str, lasers: LaserConfig) -> str:
    return (
        f"# species={species_name} omega1={fmt(lasers.omega_rabi1)} omega2={fmt(lasers.omega_rabi2)} "
        f"delta1={fmt(lasers.delta1)} delta2={fmt(lasers.delta2)}"
    )


def rate_profile_csv(profile: RateProfile) -> str:
    out = io.StringIO()
    out.write(laser_header(profile.species.name, profile.lasers) + "\n")
    out.write("v_m_per_s,R1_per_s,R2_per_s,F_N\n")
    for v, r1, r2, f in zip(profile.grid, profile.r1, profile.r2, profile.force):
        out.write(",".join(fmt(x) for x in (v, r1, r2, f)) + "\n")
    return out.getvalue()


def spectrum_csv(spectrum: Spectrum) -> str:
    out = io.StringIO()
    out.write(laser_header(spectrum.species.name, spectrum.lasers) + "\n")
    out.write("delta1_rad_per_s,R1_per_s\n")
    for d, r in zip(spectrum.delta1, spectrum.r1):
        out.write(f"{fmt(d)},{fmt(r)}\n")
    return out.getvalue()


def report_fields(report: CoolingReport) -> dict[str, str]:
    las = report.lasers
    return {
        "delta1": fmt(las.delta1),
        "delta2": fmt(las.delta2),
        "omega1": fmt(las.omega_rabi1),
        "omega2": fmt(las.omega_rabi2),
        "alpha_per_s": fmt(report.alpha),
        "H_watt": fmt(report.heating),
        "T_kelvin": fmt(report.temperature),
        "regime": report.regime,
        "capture_mps": fmt(report.capture_range),
        "saturated": fmt(report.saturation_warning),
    }


def report_csv(reports, header_comment: str | None = None) -> str:
    out = io.StringIO()
    if header_comment:
        out.write(header_comment.rstrip("\n") + "\n")
    out.write(",".join(REPORT_COLUMNS) + "\n")
    for r in reports:
        row = report_fields(r)
        out.write(",".join(row[c] for c in REPORT_COLUMNS) + "\n")
    return out.getvalue()
