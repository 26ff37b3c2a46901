"""Command-line entry point: ``cascade-cool <subcommand> [flags]``.

Exit status: 0 on success, 1 on usage errors, 2 when a computation fails.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .bloch import LaserConfig, SingularSteadyStateError
from .cooling import ConvergenceError, temperature
from .csvio import report_csv, rate_profile_csv, spectrum_csv
from .scan import (
    ConfigError,
    load_optimize_spec,
    load_scan_spec,
    optimize_summary,
    run_optimize,
    run_scan,
)
from .scattering import DEFAULT_POINTS, absorption_spectrum, default_velocity_grid, rate_profile
from .species import EmissionGeometry, SpeciesError, load_all, load_species
from .units import parse_frequency

_VALUE_FLAGS = (
    "--species", "--omega1", "--omega2", "--delta1", "--delta2", "--chi1", "--chi2",
    "--out", "--threads", "--vmax", "--points", "--start", "--stop",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}\n{self.format_usage()}")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("laser and geometry (suffix g1, g2 or MHz; bare numbers are rad/s)")
    g.add_argument("--species", default="Mg")
    g.add_argument("--omega1", default="0.01g1")
    g.add_argument("--omega2", default="0")
    g.add_argument("--delta1", default="-0.5g1")
    g.add_argument("--delta2", default="0")
    g.add_argument("--chi1", type=float, default=1.0)
    g.add_argument("--chi2", type=float, default=1.0)
    p.add_argument("--out", help="write CSV here instead of stdout")
    p.add_argument("--threads", type=int, default=1)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="cascade-cool", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    sp = sub.add_parser("species", help="list or show species data", parents=[common])
    sp.add_argument("action", choices=["list", "show"])
    sp.add_argument("name", nargs="?")

    rp = sub.add_parser("rates", help="R1, R2 and force versus velocity", parents=[common])
    rp.add_argument("--vmax", type=float, help="half-width of the velocity grid (m/s)")
    rp.add_argument("--points", type=int, default=DEFAULT_POINTS)

    spec = sub.add_parser("spectrum", help="absorption (R1 at v=0) versus delta1", parents=[common])
    spec.add_argument("--start", default="-1.5g1")
    spec.add_argument("--stop", default="1.5g1")
    spec.add_argument("--points", type=int, default=601)

    sc = sub.add_parser("scan", help="run a [scan] config file", parents=[common])
    sc.add_argument("config")
    op = sub.add_parser("optimize", help="run an [optimize] config file", parents=[common])
    op.add_argument("config")
    sub.add_parser("report", help="single-point cooling report", parents=[common])
    return parser


def _join_values(argv):
    # "--delta1 -0.5g1" would be read as two flags; glue value flags to their argument.
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def _lasers(args, species) -> LaserConfig:
    try:
        return LaserConfig(
            parse_frequency(args.omega1, species),
            parse_frequency(args.omega2, species),
            parse_frequency(args.delta1, species),
            parse_frequency(args.delta2, species),
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _geometry(args) -> EmissionGeometry:
    try:
        return EmissionGeometry(args.chi1, args.chi2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(text: str, path: str | None, stdout):
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _format_report(report) -> str:
    sp, las = report.species, report.lasers
    g1, g2 = sp.gamma1, sp.gamma2
    lines = [
        f"species      {sp.name}",
        f"omega1       {las.omega_rabi1 / g1:.6g} gamma1",
        f"omega2       {las.omega_rabi2 / g2:.6g} gamma2",
        f"delta1       {las.delta1 / g1:.6g} gamma1",
        f"delta2       {las.delta2 / g2:.6g} gamma2",
        f"chi1, chi2   {report.geometry.chi1:g}, {report.geometry.chi2:g}",
        f"regime       {report.regime}",
        f"alpha        {report.alpha:.6g} 1/s",
        f"H0           {report.heating:.6g} W",
    ]
    if report.temperature is not None:
        lines.append(f"T            {report.temperature * 1e3:.4g} mK ({report.temperature / sp.doppler_limit1:.4g} T_D1)")
    else:
        lines.append("T            undefined (no damping)")
    if report.capture_range is not None:
        flag = "" if report.capture_bounded else " (grid edge)"
        lines.append(f"capture      {report.capture_range:.6g} m/s = {report.capture_range * sp.k1 / g1:.4g} gamma1/k1{flag}")
    if report.saturation_warning:
        lines.append("warning      rho11 > 0.1: weak-probe picture not valid")
    return "\n".join(lines) + "\n"


def _run(args, stdout) -> int:
    if args.threads < 1:
        raise UsageError("--threads must be at least 1")
    cmd = args.command
    if cmd == "species":
        table = load_all()
        if args.action == "list":
            stdout.write("\n".join(table) + "\n")
            return 0
        if not args.name:
            raise UsageError("species show needs a name")
        sp = load_species(args.name)
        row = sp.table_row()
        stdout.write(f"name                 {sp.name}\n")
        for key in ("lambda1_nm", "gamma1_over_2pi_MHz", "T_D1_mK", "lambda2_nm", "gamma2_over_2pi_MHz", "T_D2_uK", "mass_u"):
            stdout.write(f"{key:<20} {row[key]:.6g}\n")
        return 0
    if cmd in ("scan", "optimize"):
        if cmd == "scan":
            table = run_scan(load_scan_spec(args.config), threads=args.threads)
            _emit(table.to_csv(), args.out, stdout)
        else:
            result = run_optimize(load_optimize_spec(args.config), threads=args.threads)
            if args.out:
                _emit(result.frontier, args.out, stdout)
            stdout.write(optimize_summary(result))
        return 0

    species = load_species(args.species)
    lasers = _lasers(args, species)
    if cmd == "rates":
        grid = default_velocity_grid(species, lasers, args.points)
        if args.vmax is not None:
            grid = np.linspace(-args.vmax, args.vmax, args.points)
        _emit(rate_profile_csv(rate_profile(species, lasers, grid)), args.out, stdout)
    elif cmd == "spectrum":
        try:
            lo, hi = parse_frequency(args.start, species), parse_frequency(args.stop, species)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        grid = np.linspace(lo, hi, args.points)
        _emit(spectrum_csv(absorption_spectrum(species, lasers, grid)), args.out, stdout)
    elif cmd == "report":
        report = temperature(species, lasers, _geometry(args))
        stdout.write(_format_report(report))
        if args.out:
            _emit(report_csv([report]), args.out, stdout)
    return 0


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_join_values(argv))
        if args.command is None:
            raise UsageError(parser.format_usage())
        return _run(args, stdout)
    except UsageError as exc:
        stderr.write(f"{exc}\n")
        return 1
    except (FileNotFoundError, ConfigError, SpeciesError) as exc:
        stderr.write(f"error: {exc}\n")
        return 1
    except (ConvergenceError, SingularSteadyStateError, ArithmeticError) as exc:
        stderr.write(f"computation failed: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
