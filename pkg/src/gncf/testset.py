"""Seeded random test-system generation.

Systems are full-band WDM combs over dispersion-shifted fiber: channels of
random symbol rate, roll-off and format packed left-to-right with random
guard gaps until the band is full; spans of random length whose
zero-dispersion wavelength is drawn from a Gaussian around the band center.

Determinism: a named 64-bit generator (PCG64) with per-system substreams
seeded by (seed, system_index), so any system can be regenerated in
isolation.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from . import units
from .exceptions import ConfigError

#: the five CUT placements; "any" draws uniformly among them per system
CUT_POLICIES = ("center", "left", "right", "lowest", "highest", "any")


@dataclass(frozen=True)
class TestSystemSpec:
    """Distribution parameters of the random test systems.

    Defaults are the full C-band low-dispersion campaign: 5 THz around
    193.41 THz, DSF spans of 80..120 km with zero-dispersion wavelength
    ~ N(1550 nm, 5 nm), symbol rates from {32, 64, 96, 128} GBaud, roll-off
    U(0.05, 0.25), guard gaps U(5, 20) GHz, noise figures U(6, 7) dB.

    ``gap_reference`` selects how the drawn spacing is applied:
    ``"rect_edges"`` (default) treats it as the guard gap between adjacent
    channel rectangles; ``"center_to_center"`` treats it as the pitch between
    channel centers, clamped so channels never overlap.
    """

    __test__ = False  # not a pytest class despite the name

    seed: int = 0
    band_center_thz: float = 193.41
    band_width_thz: float = 5.0
    symbol_rate_choices_gbaud: Tuple[float, ...] = (32.0, 64.0, 96.0, 128.0)
    rolloff_range: Tuple[float, float] = (0.05, 0.25)
    guard_gap_range_ghz: Tuple[float, float] = (5.0, 20.0)
    format_set: Tuple[str, ...] = ("qpsk", "8qam", "16qam", "32qam", "64qam")
    alpha_db_km: float = 0.22
    gamma_1_w_km: float = 1.77
    beta3_ps3_km: float = 0.121
    lambda0_mean_nm: float = 1550.0
    lambda0_std_nm: float = 5.0
    span_length_range_km: Tuple[float, float] = (80.0, 120.0)
    span_count_range: Tuple[int, int] = (1, 16)
    nf_range_db: Tuple[float, float] = (6.0, 7.0)
    power_dbm_per_channel: float = 0.0
    cut_policy: str = "any"
    gap_reference: str = "rect_edges"
    max_channels: Optional[int] = None

    def __post_init__(self):
        if self.band_width_thz <= 0:
            raise ConfigError("band width must be positive")
        for name in ("rolloff_range", "guard_gap_range_ghz",
                     "span_length_range_km", "nf_range_db"):
            lo, hi = getattr(self, name)
            if not (lo < hi):
                raise ConfigError(f"{name} must be a non-degenerate (lo, hi)")
        if self.cut_policy not in CUT_POLICIES:
            raise ConfigError(f"cut_policy must be one of {CUT_POLICIES}")
        if self.gap_reference not in ("rect_edges", "center_to_center"):
            raise ConfigError("gap_reference must be 'rect_edges' or "
                              "'center_to_center'")

    @classmethod
    def from_json(cls, text: str) -> "TestSystemSpec":
        doc = json.loads(text)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown test-spec keys {sorted(unknown)}")
        for key in ("symbol_rate_choices_gbaud", "format_set"):
            if key in doc:
                doc[key] = tuple(doc[key])
        for key in ("rolloff_range", "guard_gap_range_ghz",
                    "span_length_range_km", "span_count_range", "nf_range_db"):
            if key in doc:
                doc[key] = tuple(doc[key])
        return cls(**doc)

    def to_json(self) -> str:
        return json.dumps(dataclasses.asdict(self), indent=2) + "\n"


def _beta2_at_band_center(spec: TestSystemSpec, lambda0_m: float) -> float:
    """Span beta2 (s^2/m) at the expansion center from the drawn
    zero-dispersion wavelength.

    Linear-slope model: D(lambda) = S0 * (lambda - lambda0) with the slope S0
    chosen so the cubic Taylor coefficient at the band center equals the
    configured beta3; beta2 then follows from the standard D conversion.
    """
    beta3 = spec.beta3_ps3_km * units.PS3_PER_KM
    fc = spec.band_center_thz * units.THZ
    lam_c = units.LIGHT_SPEED / fc
    k = lam_c**2 / (2.0 * math.pi * units.LIGHT_SPEED)
    slope = beta3 / (k * k)
    d_at_center = slope * (lam_c - lambda0_m)
    return units.dispersion_to_beta2(d_at_center, lam_c)


def _draw_comb(spec: TestSystemSpec, rng: np.random.Generator) -> List[Dict[str, Any]]:
    band_lo = (spec.band_center_thz - 0.5 * spec.band_width_thz) * units.THZ
    band_hi = (spec.band_center_thz + 0.5 * spec.band_width_thz) * units.THZ
    comb: List[Dict[str, Any]] = []
    cursor = band_lo
    while True:
        rate = float(rng.choice(np.asarray(spec.symbol_rate_choices_gbaud))) * units.GHZ
        if comb:
            drawn = rng.uniform(*spec.guard_gap_range_ghz) * units.GHZ
            if spec.gap_reference == "rect_edges":
                gap = drawn
            else:
                prev_bw = comb[-1]["baud_gbaud"] * units.GHZ
                gap = max(drawn - 0.5 * (prev_bw + rate), 0.0)
            cursor += gap
        if cursor + rate > band_hi:
            break
        comb.append({
            "center_thz": (cursor + 0.5 * rate) / units.THZ,
            "baud_gbaud": rate / units.GHZ,
            "rolloff": float(rng.uniform(*spec.rolloff_range)),
            "format": str(rng.choice(np.asarray(spec.format_set))),
            "power_dbm": spec.power_dbm_per_channel,
        })
        cursor += rate
        if spec.max_channels is not None and len(comb) >= spec.max_channels:
            break
    if not comb:
        raise ConfigError("band too narrow for even one channel")
    return comb


def _choose_cut(spec: TestSystemSpec, comb: List[Dict[str, Any]],
                rng: np.random.Generator) -> Tuple[int, List[int]]:
    """CUT index per policy; returns (choice, deduplicated candidate list)."""
    centers = [c["center_thz"] for c in comb]
    band_mid = spec.band_center_thz
    center_idx = min(range(len(comb)), key=lambda i: (abs(centers[i] - band_mid), i))
    raw = {
        "center": center_idx,
        "left": max(center_idx - 1, 0),
        "right": min(center_idx + 1, len(comb) - 1),
        "lowest": 0,
        "highest": len(comb) - 1,
    }
    candidates: List[int] = []
    for key in ("center", "left", "right", "lowest", "highest"):
        if raw[key] not in candidates:
            candidates.append(raw[key])
    if spec.cut_policy == "any":
        return int(candidates[rng.integers(0, len(candidates))]), candidates
    return raw[spec.cut_policy], candidates


def generate_testset(spec: TestSystemSpec, count: int) -> List[Dict[str, Any]]:
    """Generate ``count`` link-configuration documents.

    Each document also carries no extra keys beyond the config schema; the
    per-system metadata (index, cut candidates) is returned by
    :func:`generate_testset_with_info`.
    """
    return [doc for doc, _ in generate_testset_with_info(spec, count)]


def generate_testset_with_info(spec: TestSystemSpec, count: int):
    if count < 1:
        raise ConfigError("count must be >= 1")
    out = []
    for index in range(count):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence((spec.seed, index)))
        )
        comb = _draw_comb(spec, rng)
        n_spans = int(rng.integers(spec.span_count_range[0],
                                   spec.span_count_range[1] + 1))
        spans = []
        for _ in range(n_spans):
            lambda0_m = rng.normal(spec.lambda0_mean_nm,
                                   spec.lambda0_std_nm) * 1e-9
            beta2 = _beta2_at_band_center(spec, lambda0_m)
            spans.append({
                "length_km": float(rng.uniform(*spec.span_length_range_km)),
                "alpha_db_km": spec.alpha_db_km,
                "gamma_1_w_km": spec.gamma_1_w_km,
                "beta2_ps2_km": beta2 / units.PS2_PER_KM,
                "beta3_ps3_km": spec.beta3_ps3_km,
                "fc_thz": spec.band_center_thz,
                "edfa_gain_db": "transparent",
                "nf_db": float(rng.uniform(*spec.nf_range_db)),
            })
        cut, candidates = _choose_cut(spec, comb, rng)
        doc = {"spans": spans, "comb": comb, "cut": cut}
        info = {
            "index": index,
            "seed": spec.seed,
            "n_channels": len(comb),
            "n_spans": n_spans,
            "cut": cut,
            "cut_candidates": candidates,
        }
        out.append((doc, info))
    return out
