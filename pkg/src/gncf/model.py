"""Domain model: channels, spans, links and the per-channel NLI report.

All types are immutable after construction and hold SI quantities only
(Hz, m, W/Hz, Np/m field attenuation, s^2/m, s^3/m).  Frequency-dependent
fiber/amplifier parameters are piecewise-linear tables over frequency with
flat extrapolation outside the tabulated range; a table with a single knot
behaves as a constant profile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from .exceptions import ConfigError


@dataclass(frozen=True)
class FrequencyProfile:
    """Piecewise-linear function of frequency with flat extrapolation."""

    knots_hz: Tuple[float, ...]
    values: Tuple[float, ...]

    def __post_init__(self):
        if len(self.knots_hz) != len(self.values) or not self.knots_hz:
            raise ConfigError("profile needs matching, non-empty knot/value lists")
        if any(b <= a for a, b in zip(self.knots_hz, self.knots_hz[1:])):
            raise ConfigError("profile knots must be strictly increasing")

    @classmethod
    def constant(cls, value: float) -> "FrequencyProfile":
        return cls((0.0,), (float(value),))

    @classmethod
    def from_table(cls, pairs: Iterable[Tuple[float, float]]) -> "FrequencyProfile":
        pairs = sorted((float(f), float(v)) for f, v in pairs)
        return cls(tuple(f for f, _ in pairs), tuple(v for _, v in pairs))

    @property
    def is_constant(self) -> bool:
        return len(self.values) == 1 or all(v == self.values[0] for v in self.values)

    def __call__(self, f):
        """Evaluate at frequency f (scalar or ndarray, Hz)."""
        if len(self.knots_hz) == 1:
            if np.isscalar(f):
                return self.values[0]
            return np.full(np.shape(f), self.values[0])
        out = np.interp(f, self.knots_hz, self.values)
        return float(out) if np.isscalar(f) else out


ZERO_PROFILE = FrequencyProfile.constant(0.0)


@dataclass(frozen=True)
class Channel:
    """One WDM carrier in its rectangular-spectrum approximation.

    The rectangle spans [f_start, f_end] (width = symbol rate of the original
    raised-cosine carrier) at constant launch PSD ``psd`` (the peak PSD of the
    original carrier).  ``rolloff`` is the raised-cosine roll-off of the
    original pulse and ``phi`` the modulation-format constant
    2 - E|a|^4 / (E|a|^2)^2 used by the fitted correction factors.
    """

    f_start: float          # Hz
    f_end: float            # Hz
    psd: float              # W/Hz
    rolloff: float
    phi: float
    label: str = ""

    def __post_init__(self):
        if not (self.f_end > self.f_start):
            raise ConfigError(f"channel {self.label!r}: f_end must exceed f_start")
        if self.psd < 0:
            raise ConfigError(f"channel {self.label!r}: negative PSD")
        if not (0.0 <= self.rolloff <= 1.0):
            raise ConfigError(f"channel {self.label!r}: roll-off outside [0, 1]")
        if not math.isfinite(self.phi):
            raise ConfigError(f"channel {self.label!r}: non-finite phi")

    @property
    def bandwidth(self) -> float:
        return self.f_end - self.f_start

    @property
    def f_center(self) -> float:
        return 0.5 * (self.f_start + self.f_end)

    @property
    def power_w(self) -> float:
        return self.psd * self.bandwidth


@dataclass(frozen=True)
class Span:
    """One fiber segment followed by its EDFA and optional lumped-dispersion unit.

    Loss model: alpha(z, f) = alpha0(f) + alpha1(f) * exp(-sigma(f) * z), all in
    field Np/m.  Dispersion is the cubic Taylor expansion around ``fc`` with
    coefficients beta0..beta3.  ``edfa_gain`` is the linear *power* gain profile;
    ``None`` means a transparent amplifier, Gamma(f) = exp(2 * alpha0(f) * length).

    beta0, beta1 and the phase profiles are carried for lossless config
    round-trips but do not influence the NLI magnitude: the engine works with
    |link function|^2, where pure phase factors cancel.
    """

    length: float                       # m
    gamma: float                        # 1/(W*m)
    alpha0: FrequencyProfile            # Np/m (field)
    beta2: float                        # s^2/m
    beta3: float                        # s^3/m
    fc: float                           # Hz, Taylor expansion center
    noise_figure_db: float
    alpha1: FrequencyProfile = ZERO_PROFILE   # Np/m (field)
    sigma: FrequencyProfile = ZERO_PROFILE    # 1/m
    edfa_gain: Optional[FrequencyProfile] = None  # linear power gain; None = transparent
    beta0: float = 0.0                  # 1/m, inert
    beta1: float = 0.0                  # s/m, inert
    edfa_phase: FrequencyProfile = ZERO_PROFILE  # rad, inert
    dcu_s2: float = 0.0                 # accumulated lumped dispersion, s^2, inert

    def __post_init__(self):
        if not (self.length > 0):
            raise ConfigError("span length must be positive")
        if self.gamma < 0:
            raise ConfigError("span gamma must be non-negative")
        for f, a1 in zip(self.alpha1.knots_hz, self.alpha1.values):
            if a1 != 0.0 and self.sigma(f) <= 0.0:
                raise ConfigError("sigma must be positive wherever alpha1 is nonzero")

    @property
    def transparent(self) -> bool:
        return self.edfa_gain is None

    def gain(self, f):
        """Linear EDFA power gain at frequency f."""
        if self.edfa_gain is not None:
            return self.edfa_gain(f)
        a0 = self.alpha0(f)
        return np.exp(2.0 * a0 * self.length)

    def dcu_phase(self, f):
        """Phase (rad) imposed by the lumped accumulated-dispersion unit."""
        return 2.0 * math.pi**2 * self.dcu_s2 * (np.asarray(f) - self.fc) ** 2

    @property
    def has_raman_term(self) -> bool:
        return any(v != 0.0 for v in self.alpha1.values)

    @property
    def is_flat_loss(self) -> bool:
        """Frequency- and distance-independent loss (constant alpha0, no alpha1)."""
        return self.alpha0.is_constant and not self.has_raman_term


@dataclass(frozen=True)
class Link:
    """Ordered spans, the WDM comb and the index of the channel under test."""

    spans: Tuple[Span, ...]
    comb: Tuple[Channel, ...]
    cut_index: int

    def __post_init__(self):
        if not self.spans:
            raise ConfigError("link needs at least one span")
        if not self.comb:
            raise ConfigError("link needs at least one channel")
        if not (0 <= self.cut_index < len(self.comb)):
            raise ConfigError(f"cut index {self.cut_index} out of range")
        for a, b in zip(self.comb, self.comb[1:]):
            if b.f_start < a.f_start:
                raise ConfigError("comb must be sorted by start frequency")
            if b.f_start < a.f_end:
                raise ConfigError(
                    f"channels {a.label!r} and {b.label!r} overlap"
                )

    @property
    def n_spans(self) -> int:
        return len(self.spans)

    @property
    def n_channels(self) -> int:
        return len(self.comb)

    @property
    def cut(self) -> Channel:
        return self.comb[self.cut_index]

    @property
    def f_cut(self) -> float:
        return self.cut.f_center

    def with_cut(self, cut_index: int) -> "Link":
        return Link(self.spans, self.comb, cut_index)


@dataclass(frozen=True)
class NliRow:
    """NLI PSD decomposition for one channel evaluated as the CUT."""

    label: str
    f_cut: float                 # Hz
    g_sci: float                 # W/Hz
    g_xci: float                 # W/Hz
    g_mci: float                 # W/Hz
    g_coherence_correction: float  # W/Hz, may be negative
    osnr_nl_db: Optional[float] = None

    @property
    def g_total(self) -> float:
        return math.fsum(
            (self.g_sci, self.g_xci, self.g_mci, self.g_coherence_correction)
        )


@dataclass(frozen=True)
class NliReport:
    rows: Tuple[NliRow, ...]

    def row_for(self, label: str) -> NliRow:
        for row in self.rows:
            if row.label == label:
                return row
        raise KeyError(label)
