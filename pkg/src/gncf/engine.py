"""Closed-form per-channel NLI assembly.

The total NLI PSD at the channel under test is the sum of three closed-form
terms plus an optional multi-span coherence correction:

* SCI/XCI: a single sum over interfering channels with the per-channel
  approximation (island = full channel rectangle at the interferer's
  mid-frequency), with per-span fitted correction factors available;
* MCI: the exact triple sum over the remaining channel triples, each island
  replaced by its equal-area concentric square;
* coherence: a per-span sine-integral correction to the SCI term that
  accounts for cross-span interference growth; exactly zero for one span.

Two kernels are supported: ``dilog`` evaluates the rectangle integrals
exactly through f_int, ``asinh`` substitutes the pi*asinh(x/2) surrogate.
The engine is a pure function of (link, switches, coefficients); triple
batches are reduced block-wise with exact (fsum) accumulation in a fixed
order, so results are bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources
from typing import Dict, Iterable, List, Literal, Optional, Tuple

import numpy as np

from .exceptions import GncfError, ModelDomainError
from .islands import island_arrays, triple_class_masks
from .model import Link, NliReport, NliRow
from .special import (box_kernel_sum_arrays, harmonic_number, sine_integral)
from .spans import (beta2_bar, effective_alpha0, effective_span_params,
                    field_log_transfer, fit_effective_raman_arrays, g0,
                    g0_flat, lorentzian_coefficients)
from .units import PLANCK, db_to_linear

__all__ = [
    "EngineSwitches",
    "CorrectionCoefficients",
    "g_nli_generic",
    "island_sum_by_class",
    "sci_xci",
    "mci",
    "g_nli_total",
    "rho_cut",
    "rho_mch",
    "accumulated_dispersion_sci",
    "accumulated_dispersion_xci",
    "ase_power_w",
    "osnr_nl",
    "analyze_link",
]

_BLOCK = 1 << 16

FintMode = Literal["dilog", "asinh"]
LossMode = Literal["auto", "general", "flat"]
RhoMode = Literal["unity", "fitted"]

#: |phi| below this counts as a Gaussian constellation for the delta switches
PHI_GAUSSIAN_TOL = 1e-9


@dataclass(frozen=True)
class EngineSwitches:
    """On/off and mode selectors of the corrected total formula."""

    rho_coh: int = 1
    rho_mci: int = 1
    rho_sci_mode: RhoMode = "fitted"
    rho_xci_mode: RhoMode = "fitted"
    fint_mode: FintMode = "asinh"

    def __post_init__(self):
        if self.rho_coh not in (0, 1):
            raise ValueError("rho_coh must be 0 or 1")
        if self.rho_mci not in (0, 1):
            raise ValueError("rho_mci must be 0 or 1")
        if self.rho_sci_mode not in ("unity", "fitted"):
            raise ValueError("rho_sci_mode must be 'unity' or 'fitted'")
        if self.rho_xci_mode not in ("unity", "fitted"):
            raise ValueError("rho_xci_mode must be 'unity' or 'fitted'")
        if self.fint_mode not in ("dilog", "asinh"):
            raise ValueError("fint_mode must be 'dilog' or 'asinh'")

    @property
    def needs_coefficients(self) -> bool:
        return "fitted" in (self.rho_sci_mode, self.rho_xci_mode)


UNCORRECTED = EngineSwitches(rho_coh=0, rho_mci=1, rho_sci_mode="unity",
                             rho_xci_mode="unity", fint_mode="dilog")


@dataclass(frozen=True)
class CorrectionCoefficients:
    """The 23 fitted coefficients of the correction factors.

    Stored index-ordered; ``a(i)`` is 1-based.  The correction-factor
    features are evaluated on engineering scales - channel bandwidth in GHz,
    accumulated dispersion in ps^2 - which is the scale the shipped defaults
    were fitted on (the a11/a23 floors inside the log10 terms sit in the
    middle of typical per-link accumulated-dispersion values on that scale,
    and the resulting factors are order-1 corrections).
    """

    values: Tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != 23:
            raise ValueError(f"need exactly 23 coefficients, got {len(self.values)}")

    def a(self, index: int) -> float:
        return self.values[index - 1]

    @classmethod
    def from_text(cls, text: str) -> "CorrectionCoefficients":
        vals = tuple(float(tok) for tok in text.split())
        return cls(vals)

    @classmethod
    def from_file(cls, path) -> "CorrectionCoefficients":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_text(fh.read())

    @classmethod
    def defaults(cls) -> "CorrectionCoefficients":
        text = resources.files("gncf").joinpath(
            "data/correction_coefficients.txt").read_text(encoding="utf-8")
        return cls.from_text(text)

    def to_text(self) -> str:
        return " ".join(repr(v) for v in self.values) + "\n"


# --- fitted correction factors ---------------------------------------------

def accumulated_dispersion_sci(link: Link, n_s: int) -> float:
    """Effective accumulated dispersion (s^2) seen by the CUT entering span
    n_s (1-based); zero for the first span."""
    f_cut = link.f_cut
    return math.fsum(
        float(beta2_bar(link.spans[k], f_cut, f_cut)) * link.spans[k].length
        for k in range(n_s - 1)
    )


def accumulated_dispersion_xci(link: Link, n_s: int, m_ch: int) -> float:
    """Same as :func:`accumulated_dispersion_sci` for the pair (interferer
    mid-frequency, CUT)."""
    f_cut = link.f_cut
    mid_m = link.comb[m_ch].f_center
    return math.fsum(
        float(beta2_bar(link.spans[k], mid_m, f_cut)) * link.spans[k].length
        for k in range(n_s - 1)
    )


def _check_phi(phi: float) -> float:
    if phi < 0.0:
        raise ModelDomainError(
            "fitted correction factors are defined for phi >= 0"
        )
    return phi


#: feature scales of the fitted correction factors
_BW_SCALE = 1e9     # Hz -> GHz
_ACC_SCALE = 1e-24  # s^2 -> ps^2


def rho_cut(n_s: int, link: Link, coefficients: CorrectionCoefficients) -> float:
    """Fitted SCI correction factor of span n_s (1-based) for the CUT."""
    a = coefficients.a
    cut = link.cut
    r = cut.rolloff
    phi = _check_phi(cut.phi)
    bw = cut.bandwidth / _BW_SCALE
    delta = 1.0 if abs(phi) < PHI_GAUSSIAN_TOL else 0.0
    acc = accumulated_dispersion_sci(link, n_s) / _ACC_SCALE
    inner = 1.0 + a(8) * bw ** a(9) + a(10) * math.log10(abs(acc) + a(11))
    return (1.0 + a(1) * r ** a(2)) * (
        a(3) + a(4) * phi ** a(5) + a(6) * (1.0 + a(7) * delta) * inner
    )


def rho_mch(n_s: int, m_ch: int, link: Link,
            coefficients: CorrectionCoefficients) -> float:
    """Fitted XCI correction factor of span n_s (1-based) for interferer
    m_ch (index into the comb, must differ from the CUT)."""
    if m_ch == link.cut_index:
        raise ValueError("rho_mch is defined for interferers only (m_ch != CUT)")
    a = coefficients.a
    r = link.cut.rolloff
    phi = _check_phi(link.comb[m_ch].phi)
    delta = 1.0 if abs(phi) < PHI_GAUSSIAN_TOL else 0.0
    acc = accumulated_dispersion_xci(link, n_s, m_ch) / _ACC_SCALE
    inner = 1.0 + a(22) * math.log10(abs(acc) + a(23))
    return (1.0 + a(12) * r ** a(13)) * (
        a(14) + a(15) * (phi + a(16)) ** a(17)
        + a(18) * (phi + a(19)) ** a(20) * (1.0 + a(21) * delta) * inner
    )


# --- SCI/XCI closed form -----------------------------------------------------

def _si_over_x(x: float) -> float:
    """Si(x)/x, series-guarded at the origin."""
    if abs(x) < 1e-4:
        x2 = x * x
        return 1.0 - x2 / 18.0 + x2 * x2 / 600.0
    return sine_integral(x) / x


def _resolve_loss_mode(link: Link, loss_mode: LossMode) -> bool:
    """True = take the flat-loss route."""
    flat_link = all(s.is_flat_loss for s in link.spans)
    if loss_mode == "auto":
        return flat_link
    if loss_mode == "flat":
        if not flat_link:
            raise ModelDomainError(
                "loss_mode='flat' requires constant alpha0 and no Raman term "
                "on every span"
            )
        return True
    return False


def _sci_xci_components(
    link: Link,
    cut_index: int,
    fint_mode: FintMode,
    loss_mode: LossMode,
    rho_coh: int,
    sci_rho,
    xci_rho,
) -> Tuple[float, float, float]:
    """(g_sci, g_xci, g_coherence) of the per-channel closed form.

    ``sci_rho``/``xci_rho`` map span index (and interferer index) to the
    correction factors; pass constants 1.0 through ``lambda`` for the plain
    form.
    """
    flat_route = _resolve_loss_mode(link, loss_mode)
    cut = link.comb[cut_index]
    f_cut = cut.f_center
    bw_cut = cut.bandwidth
    w_half = 0.5 * bw_cut
    n_spans = link.n_spans
    bracket = harmonic_number(n_spans - 1) + (1.0 - n_spans) / n_spans

    sci_terms: List[float] = []
    coh_terms: List[float] = []
    xci_terms: List[float] = []
    cache: Dict = {}

    for m, ch in enumerate(link.comb):
        mid = ch.f_center
        x1 = mid - f_cut - 0.5 * ch.bandwidth
        x2 = mid - f_cut + 0.5 * ch.bandwidth
        gg = ch.psd * ch.psd * cut.psd
        mult = 1.0 if m == cut_index else 2.0
        span_terms: List[float] = []
        for ns in range(1, n_spans + 1):
            span = link.spans[ns - 1]
            if flat_route:
                a0 = span.alpha0.values[0]
                b2 = float(beta2_bar(span, mid, f_cut))
                J1, D1 = 0.0, 0.0
                J2 = 1.0 / (4.0 * a0 * a0)
                D2 = 2.0 * math.pi**2 * b2 / a0
                g0v = g0_flat(link, ns, mid, f_cut, f_cut)
            else:
                eff = effective_span_params(span, mid, f_cut, f_cut,
                                            cache=cache, cache_key=(ns, m))
                a0 = eff.alpha0_bar
                b2 = eff.beta2_bar
                J1, J2, D1, D2 = eff.J1, eff.J2, eff.D1_bar, eff.D2_bar
                g0v = g0(link, ns, mid, f_cut, f_cut)
            weight = span.gamma**2 * g0v * g0v
            box = float(box_kernel_sum_arrays(D2, J2, x1, x2,
                                              -w_half, w_half, fint_mode))
            if J1 != 0.0:
                box += float(box_kernel_sum_arrays(D1, J1, x1, x2,
                                                   -w_half, w_half, fint_mode))
            rho = sci_rho(ns) if m == cut_index else xci_rho(ns, m)
            span_terms.append(weight * rho * box)
            if m == cut_index and rho_coh:
                x_si = math.pi**2 * abs(b2) * span.length * bw_cut * bw_cut
                coh = (weight * rho * bracket * _si_over_x(x_si)
                       * bw_cut * bw_cut / (2.0 * a0 * a0))
                coh_terms.append((16.0 / 27.0) * gg * coh)
        contribution = (16.0 / 27.0) * gg * mult * math.fsum(span_terms)
        if m == cut_index:
            sci_terms.append(contribution)
        else:
            xci_terms.append(contribution)
    return math.fsum(sci_terms), math.fsum(xci_terms), math.fsum(coh_terms)


def sci_xci(link: Link, cut: Optional[int] = None,
            loss_mode: LossMode = "auto",
            fint_mode: FintMode = "dilog") -> float:
    """Self- plus cross-channel interference PSD (W/Hz) at the CUT's center
    frequency, per-channel closed form, no correction factors."""
    cut_index = link.cut_index if cut is None else cut
    g_sci, g_xci, _ = _sci_xci_components(
        link, cut_index, fint_mode, loss_mode, rho_coh=0,
        sci_rho=lambda ns: 1.0, xci_rho=lambda ns, m: 1.0,
    )
    return g_sci + g_xci


# --- exact-island triple sums -----------------------------------------------

def _island_block(link: Link, f: float, lo: int, hi: int, subset: str,
                  cut_index: int, fint_mode: FintMode,
                  force_general: bool, suffix_log: np.ndarray):
    """Per-class fsum-able totals of one lexicographic block of triples."""
    n_c = link.n_channels
    idx = np.arange(lo, hi, dtype=np.int64)
    ms = idx // (n_c * n_c)
    rem = idx - ms * (n_c * n_c)
    ns_ = rem // n_c
    ks = rem - ns_ * n_c

    sci_m, xci_m, mci_m = triple_class_masks(n_c, cut_index, ms, ns_, ks)
    if subset == "mci":
        keep = mci_m
        ms, ns_, ks = ms[keep], ns_[keep], ks[keep]
        if ms.size == 0:
            return {"sci": 0.0, "xci": 0.0, "mci": 0.0}

    fs = np.array([c.f_start for c in link.comb])
    fe = np.array([c.f_end for c in link.comb])
    psd = np.array([c.psd for c in link.comb])

    S, f1s, f2s, _ = island_arrays(fs[ms], fe[ms], fs[ns_], fe[ns_],
                                   fs[ks], fe[ks], f)
    keep = S > 0.0
    if not np.any(keep):
        return {"sci": 0.0, "xci": 0.0, "mci": 0.0}
    ms, ns_, ks = ms[keep], ns_[keep], ks[keep]
    S, f1s, f2s = S[keep], f1s[keep], f2s[keep]

    half = 0.5 * np.sqrt(S)
    x_lo, x_hi = f1s - f - half, f1s - f + half
    y_lo, y_hi = f2s - f - half, f2s - f + half
    ggg = psd[ms] * psd[ns_] * psd[ks]
    f3s = f1s + f2s - f

    tot = np.zeros_like(S)
    acc1 = np.zeros_like(S)
    acc2 = np.zeros_like(S)
    acc3 = np.zeros_like(S)
    for ns in range(1, link.n_spans + 1):
        span = link.spans[ns - 1]
        if span.is_flat_loss and not force_general:
            a0 = span.alpha0.values[0]
            a1 = 0.0
            sb = 0.0
        else:
            a0 = effective_alpha0(span, f1s, f2s, f)
            a1, sb = fit_effective_raman_arrays(span, f1s, f2s, f)
        b2 = beta2_bar(span, f1s, f2s)
        J1, J2, D1, D2 = lorentzian_coefficients(a0, a1, sb, b2)
        log_g0 = acc1 + acc2 + acc3 + suffix_log[ns - 1]
        weight = span.gamma**2 * np.exp(2.0 * log_g0)
        box = box_kernel_sum_arrays(D2, J2, x_lo, x_hi, y_lo, y_hi, fint_mode)
        if np.any(np.asarray(J1) != 0.0):
            box = box + box_kernel_sum_arrays(D1, J1, x_lo, x_hi,
                                              y_lo, y_hi, fint_mode)
        tot = tot + weight * box
        acc1 = acc1 + field_log_transfer(span, f1s)
        acc2 = acc2 + field_log_transfer(span, f2s)
        acc3 = acc3 + field_log_transfer(span, f3s)

    totals = (16.0 / 27.0) * ggg * tot
    sci_m, xci_m, mci_m = triple_class_masks(n_c, cut_index, ms, ns_, ks)
    return {
        "sci": math.fsum(totals[sci_m].tolist()),
        "xci": math.fsum(totals[xci_m].tolist()),
        "mci": math.fsum(totals[mci_m].tolist()),
    }


def _island_sum(link: Link, f: float, subset: str, fint_mode: FintMode,
                cut_index: Optional[int] = None,
                force_general: bool = False,
                n_jobs: int = 1, block_size: int = _BLOCK) -> Dict[str, float]:
    """Triple sum over exact-geometry islands, reduced deterministically.

    Blocks are fixed lexicographic slices of the (m, n, k) cube; per-block
    per-triple totals are reduced with exact summation and blocks are folded
    in index order, so results do not depend on ``n_jobs``.
    """
    cut_index = link.cut_index if cut_index is None else cut_index
    f = float(f)
    n_total = link.n_channels**3

    # log factors of the second g0 product: sum_{p >= ns} of the span's own
    # loss at f minus its amplifier log-gain
    per_span = np.array([
        float(field_log_transfer(s, f)) - math.log(float(s.gain(f)))
        for s in link.spans
    ])
    suffix_log = np.cumsum(per_span[::-1])[::-1]

    blocks = [(lo, min(lo + block_size, n_total))
              for lo in range(0, n_total, block_size)]

    def run(block):
        lo, hi = block
        return _island_block(link, f, lo, hi, subset, cut_index,
                             fint_mode, force_general, suffix_log)

    if n_jobs <= 1 or len(blocks) == 1:
        results = [run(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            results = list(pool.map(run, blocks))

    return {
        cls: math.fsum(r[cls] for r in results)
        for cls in ("sci", "xci", "mci")
    }


def g_nli_generic(link: Link, f: float, fint_mode: FintMode = "dilog",
                  loss_mode: LossMode = "auto",
                  n_jobs: int = 1) -> float:
    """Full triple sum over all channel triples with exact island geometry,
    evaluated at frequency f (W/Hz).  No per-channel approximation and no
    correction factors; this is the form the quadrature oracle checks."""
    force_general = loss_mode == "general"
    if loss_mode == "flat":
        _resolve_loss_mode(link, "flat")
    parts = _island_sum(link, f, "all", fint_mode,
                        force_general=force_general, n_jobs=n_jobs)
    return parts["sci"] + parts["xci"] + parts["mci"]


def island_sum_by_class(link: Link, f: float, fint_mode: FintMode = "dilog",
                        n_jobs: int = 1) -> Dict[str, float]:
    """Class-resolved exact-island triple sums at frequency f."""
    return _island_sum(link, f, "all", fint_mode, n_jobs=n_jobs)


def mci(link: Link, cut: Optional[int] = None,
        loss_mode: LossMode = "auto", fint_mode: FintMode = "dilog",
        n_jobs: int = 1) -> float:
    """Multi-channel-interference PSD (W/Hz) at the CUT's center frequency:
    the exact-island triple sum restricted to the MCI class."""
    cut_index = link.cut_index if cut is None else cut
    force_general = loss_mode == "general"
    if loss_mode == "flat":
        _resolve_loss_mode(link, "flat")
    parts = _island_sum(link, link.comb[cut_index].f_center, "mci", fint_mode,
                        cut_index=cut_index, force_general=force_general,
                        n_jobs=n_jobs)
    return parts["mci"]


# --- corrected total ---------------------------------------------------------

def g_nli_total(link: Link, cut: Optional[int] = None,
                switches: EngineSwitches = EngineSwitches(),
                coefficients: Optional[CorrectionCoefficients] = None,
                loss_mode: LossMode = "auto",
                n_jobs: int = 1) -> NliRow:
    """Corrected total NLI PSD at the CUT's center frequency, decomposed into
    SCI / XCI / MCI / coherence components (W/Hz)."""
    cut_index = link.cut_index if cut is None else cut
    if switches.needs_coefficients and coefficients is None:
        raise GncfError(
            "fitted rho modes need a coefficient table; pass "
            "CorrectionCoefficients.defaults() or a loaded file"
        )

    if switches.rho_sci_mode == "fitted":
        sci_rho = lambda ns: rho_cut(ns, link.with_cut(cut_index), coefficients)
    else:
        sci_rho = lambda ns: 1.0
    if switches.rho_xci_mode == "fitted":
        xci_rho = lambda ns, m: rho_mch(ns, m, link.with_cut(cut_index),
                                        coefficients)
    else:
        xci_rho = lambda ns, m: 1.0

    g_sci, g_xci, g_coh = _sci_xci_components(
        link, cut_index, switches.fint_mode, loss_mode,
        rho_coh=switches.rho_coh, sci_rho=sci_rho, xci_rho=xci_rho,
    )
    g_mci = 0.0
    if switches.rho_mci:
        g_mci = mci(link, cut_index, loss_mode=loss_mode,
                    fint_mode=switches.fint_mode, n_jobs=n_jobs)

    ch = link.comb[cut_index]
    return NliRow(
        label=ch.label,
        f_cut=ch.f_center,
        g_sci=g_sci,
        g_xci=g_xci,
        g_mci=g_mci,
        g_coherence_correction=g_coh,
    )


# --- OSNR ---------------------------------------------------------------------

def ase_power_w(link: Link, cut: Optional[int] = None) -> float:
    """ASE power (W) accumulated over the link's amplifiers in the CUT band:
    sum of NF * h * f * (Gamma - 1) * BW.  Attenuating 'amplifiers'
    (Gamma < 1) contribute nothing."""
    cut_index = link.cut_index if cut is None else cut
    ch = link.comb[cut_index]
    f = ch.f_center
    return math.fsum(
        db_to_linear(s.noise_figure_db) * PLANCK * f
        * max(float(s.gain(f)) - 1.0, 0.0) * ch.bandwidth
        for s in link.spans
    )


def osnr_nl(link: Link, cut: Optional[int], ase_power: Optional[float],
            row: NliRow) -> float:
    """OSNR including NLI: 10 log10(P_ch / (P_ASE + P_NLI)) with
    P_NLI = G_NLI(f_cut) * BW_cut (flat-PSD approximation) and P_ch the
    launch power of the CUT.  ``ase_power=None`` computes the ASE from the
    spans' noise figures."""
    cut_index = link.cut_index if cut is None else cut
    ch = link.comb[cut_index]
    p_ch = ch.power_w
    p_ase = ase_power_w(link, cut_index) if ase_power is None else ase_power
    p_nli = row.g_total * ch.bandwidth
    if p_ch <= 0.0:
        raise ModelDomainError("channel launch power must be positive")
    denom = p_ase + p_nli
    if denom <= 0.0:
        raise ModelDomainError(
            "P_ASE + P_NLI must be positive for an OSNR (degenerate input)"
        )
    return 10.0 * math.log10(p_ch / denom)


def analyze_link(link: Link,
                 switches: EngineSwitches = EngineSwitches(),
                 coefficients: Optional[CorrectionCoefficients] = None,
                 channels: Optional[Iterable[int]] = None,
                 ase_power: Optional[float] = None,
                 with_osnr: bool = True,
                 n_jobs: int = 1) -> NliReport:
    """Evaluate the corrected total for each requested channel as the CUT."""
    indices = range(link.n_channels) if channels is None else channels
    rows = []
    for i in indices:
        row = g_nli_total(link, i, switches, coefficients, n_jobs=n_jobs)
        if with_osnr:
            row = NliRow(
                label=row.label, f_cut=row.f_cut, g_sci=row.g_sci,
                g_xci=row.g_xci, g_mci=row.g_mci,
                g_coherence_correction=row.g_coherence_correction,
                osnr_nl_db=osnr_nl(link, i, ase_power, row),
            )
        rows.append(row)
    return NliReport(rows=tuple(rows))
