"""Modulation-format constants derived from ideal constellations.

The engine's fitted correction factors depend on the format constant

    phi = 2 - E|a|^4 / (E|a|^2)^2

which is 1 for QPSK, 0 for a circular-Gaussian ensemble and in between for
QAM grids.  The built-in table below is computed at import time from ideal
constellations; a channel may always override it with an explicit ``phi``.
"""

from __future__ import annotations

import math
from typing import Dict, Optional, Sequence, Tuple

from .exceptions import ConfigError


def compute_phi(points: Sequence[complex],
                probabilities: Optional[Sequence[float]] = None) -> float:
    """Format constant of a finite constellation.

    Args:
        points: constellation points in the complex plane.
        probabilities: optional symbol probabilities (default equiprobable).

    Returns:
        2 - E|a|^4 / (E|a|^2)^2.  Scale-invariant in the constellation.
    """
    if len(points) == 0:
        raise ValueError("empty constellation")
    if probabilities is None:
        probabilities = [1.0 / len(points)] * len(points)
    if len(probabilities) != len(points):
        raise ValueError("probabilities must match points")
    m2 = math.fsum(p * abs(a) ** 2 for a, p in zip(points, probabilities))
    m4 = math.fsum(p * abs(a) ** 4 for a, p in zip(points, probabilities))
    if m2 <= 0.0:
        raise ValueError("degenerate constellation: E|a|^2 must be positive")
    return 2.0 - m4 / (m2 * m2)


def _square_qam(levels_per_axis: int) -> Tuple[complex, ...]:
    amps = [2 * i + 1 - levels_per_axis for i in range(levels_per_axis)]
    return tuple(complex(x, y) for x in amps for y in amps)


def _cross_32qam() -> Tuple[complex, ...]:
    # 6x6 grid with the four corners removed
    pts = _square_qam(6)
    return tuple(p for p in pts if not (abs(p.real) == 5 and abs(p.imag) == 5))


def _star_8qam() -> Tuple[complex, ...]:
    # inner QPSK at 45 deg, outer QPSK on the axes with radius 1 + sqrt(3)
    # (the max-min-distance 8-point constellation)
    r = 1.0 + math.sqrt(3.0)
    inner = [complex(math.cos(t), math.sin(t)) for t in
             (math.pi / 4, 3 * math.pi / 4, 5 * math.pi / 4, 7 * math.pi / 4)]
    outer = [r * complex(math.cos(t), math.sin(t)) for t in
             (0.0, math.pi / 2, math.pi, 3 * math.pi / 2)]
    return tuple(inner + outer)


CONSTELLATIONS: Dict[str, Tuple[complex, ...]] = {
    "qpsk": _square_qam(2),
    "8qam": _star_8qam(),
    "16qam": _square_qam(4),
    "32qam": _cross_32qam(),
    "64qam": _square_qam(8),
    "256qam": _square_qam(16),
}

PHI_TABLE: Dict[str, float] = {
    name: compute_phi(points) for name, points in CONSTELLATIONS.items()
}
# circular Gaussian input: E|a|^4 = 2 (E|a|^2)^2 exactly
PHI_TABLE["gaussian"] = 0.0


def phi_for_format(name: str) -> float:
    """Look up phi for a format name; 'pm-' prefixes and case are ignored."""
    key = name.strip().lower()
    if key.startswith("pm-"):
        key = key[3:]
    try:
        return PHI_TABLE[key]
    except KeyError:
        raise ConfigError(
            f"unknown modulation format {name!r} and no explicit phi given; "
            f"known formats: {sorted(PHI_TABLE)}"
        ) from None
