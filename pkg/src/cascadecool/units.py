"""Frequency literals with linewidth or MHz suffixes.

``-0.5g1`` means -0.5 gamma1, ``10g2`` means 10 gamma2, ``20MHz`` means
2 pi x 20 MHz; a bare number is taken as rad/s.
"""
from __future__ import annotations

import math
import re

from .species import Species

_LITERAL = re.compile(r"^\s*([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\s*(g1|g2|mhz|rad/s)?\s*$", re.IGNORECASE)


def parse_frequency(text: str, species: Species) -> float:
    """Angular frequency in rad/s."""
    m = _LITERAL.match(str(text))
    if not m:
        raise ValueError(f"cannot parse frequency {text!r} (use e.g. -0.5g1, 10g2, 20MHz)")
    value = float(m.group(1))
    unit = (m.group(2) or "rad/s").lower()
    if unit == "g1":
        return value * species.gamma1
    if unit == "g2":
        return value * species.gamma2
    if unit == "mhz":
        return 2 * math.pi * value * 1e6
    return value


def parse_range(text: str, species: Species, default_points: int | None = None) -> tuple[float, float, int]:
    """``start:stop:points`` (points optional when ``default_points`` is given)."""
    parts = [p.strip() for p in str(text).split(":")]
    if len(parts) == 2 and default_points is not None:
        parts.append(str(default_points))
    if len(parts) != 3:
        raise ValueError(f"range must be 'start:stop:points', got {text!r}")
    start, stop = parse_frequency(parts[0], species), parse_frequency(parts[1], species)
    try:
        points = int(parts[2])
    except ValueError:
        raise ValueError(f"range point count must be an integer, got {parts[2]!r}") from None
    return start, stop, points
