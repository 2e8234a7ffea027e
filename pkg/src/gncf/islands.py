"""Integration-island geometry and channel-triple classification.

For a channel triple (m, n, k) and an evaluation frequency f, the island is
the part of the rectangle [f_start_m, f_end_m] x [f_start_n, f_end_n] where
additionally f_start_k + f <= f1 + f2 <= f_end_k + f.  The closed-form model
replaces each island by the concentric square of equal area; this module
computes that square's area, centroid and side length from the cumulative-area
decomposition of the clipped rectangle (lower triangle + middle band + upper
triangle, each entered and exited by the two diagonal cut lines).

Boundary contact uses the half-convention step function (u(0) = 1/2) with
exact IEEE comparisons: tangent configurations are knife-edge by design, and
they always yield zero area.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .model import Channel


class TripleClass(enum.Enum):
    """Partition of channel triples by how their indices relate to the CUT."""

    SCI = "sci"
    XCI_1 = "xci_1"   # m = n = CUT, k != CUT
    XCI_2 = "xci_2"   # m = k = CUT, n != CUT
    XCI_3 = "xci_3"   # n = k = CUT, m != CUT
    XCI_4 = "xci_4"   # n = k != CUT, m = CUT
    XCI_5 = "xci_5"   # m = k != CUT, n = CUT
    XCI_6 = "xci_6"   # m = n != CUT, k = CUT
    MCI = "mci"

    @property
    def is_xci(self) -> bool:
        return self.name.startswith("XCI")


def classify_triple(m: int, n: int, k: int, cut_index: int) -> TripleClass:
    """Exactly one class per triple; the eight classes partition the cube."""
    c = cut_index
    if m == n == k == c:
        return TripleClass.SCI
    if m == c and n == c:
        return TripleClass.XCI_1
    if m == c and k == c:
        return TripleClass.XCI_2
    if n == c and k == c:
        return TripleClass.XCI_3
    if m == c and n == k:
        return TripleClass.XCI_4
    if n == c and m == k:
        return TripleClass.XCI_5
    if k == c and m == n:
        return TripleClass.XCI_6
    return TripleClass.MCI


@dataclass(frozen=True)
class IslandSquare:
    """Equal-area concentric square replacing one integration island.

    ``empty`` marks zero-area islands (the triple contributes nothing); the
    centroid is only defined when the area is positive.  The intermediate
    quantities of the cumulative-area decomposition are retained for
    diagnostics.
    """

    area: float                      # Hz^2
    f1_star: Optional[float]         # Hz
    f2_star: Optional[float]         # Hz
    L1: float                        # Hz
    L2: float                        # Hz
    empty: bool
    F1: float
    F2: float
    F3: float
    F4: float
    tau1_plus: float
    tau1_minus: float
    tau1: float
    tau2: float
    tau3_plus: float
    tau3_minus: float
    s1_plus: float
    s1_minus: float
    s2: float
    s3_plus: float
    s3_minus: float


def _u(x: np.ndarray) -> np.ndarray:
    # step function with half-convention at 0, exact comparisons
    return np.where(x > 0.0, 1.0, np.where(x == 0.0, 0.5, 0.0))


def island_arrays(fsm, fem, fsn, fen, fsk, fek, f: float):
    """Vectorized island square for arrays of channel-edge frequencies.

    Args:
        fsm, fem: start/end frequency of channel m (arrays or scalars, Hz).
        fsn, fen: same for channel n.
        fsk, fek: same for channel k.
        f: evaluation frequency (scalar, Hz).

    Returns:
        (S, f1_star, f2_star) arrays; the centroid entries are NaN where
        S = 0 (empty island).
    """
    fsm, fem = np.asarray(fsm, float), np.asarray(fem, float)
    fsn, fen = np.asarray(fsn, float), np.asarray(fen, float)
    fsk, fek = np.asarray(fsk, float), np.asarray(fek, float)

    bw_m = fem - fsm
    bw_n = fen - fsn
    fsk_f = fsk + f
    fek_f = fek + f

    F1 = fsm + fsn
    F2 = np.minimum(fsm + fen, fem + fsn)
    F3 = np.maximum(fsm + fen, fem + fsn)
    F4 = fem + fen

    t1p = np.minimum(fek_f, F2)
    t1m = np.maximum(fsk_f, F1)
    t1 = np.maximum(fsk_f, F2)
    t2 = np.minimum(fek_f, F3)
    t3p = np.maximum(fsk_f, F3)
    t3m = np.minimum(fek_f, F4)

    gate1 = _u(F2 - fsk_f) * _u(fek_f - F1)
    gate2 = _u(F3 - fsk_f) * _u(fek_f - F2)
    gate3 = _u(F4 - fsk_f) * _u(fek_f - F3)

    s1p = 0.5 * (t1p - F1) ** 2 * gate1
    s1m = 0.5 * (t1m - F1) ** 2 * gate1
    s2 = (t2 - t1) * np.minimum(bw_m, bw_n) * gate2
    s3p = 0.5 * (t3p - F4) ** 2 * gate3
    s3m = 0.5 * (t3m - F4) ** 2 * gate3

    S = s1p - s1m + s2 + s3p - s3m

    # centroids of the partial shapes
    f1_lo = (2.0 * fsm - fsn) / 3.0       # + tau/3 for the lower triangle
    f2_lo = (2.0 * fsn - fsm) / 3.0
    f1_hi = (2.0 * fem - fen) / 3.0       # + tau/3 for the upper triangle
    f2_hi = (2.0 * fen - fem) / 3.0
    mid_m = 0.5 * (fem + fsm)
    mid_n = 0.5 * (fen + fsn)
    um = _u(bw_n - bw_m)                  # band spans the full m channel
    un = _u(bw_m - bw_n)
    tmid = 0.5 * (t1 + t2)
    f1_band = mid_m * um + (tmid - mid_n) * un
    f2_band = mid_n * un + (tmid - mid_m) * um

    num1 = (s1p * (f1_lo + t1p / 3.0) - s1m * (f1_lo + t1m / 3.0)
            + s2 * f1_band
            + s3p * (f1_hi + t3p / 3.0) - s3m * (f1_hi + t3m / 3.0))
    num2 = (s1p * (f2_lo + t1p / 3.0) - s1m * (f2_lo + t1m / 3.0)
            + s2 * f2_band
            + s3p * (f2_hi + t3p / 3.0) - s3m * (f2_hi + t3m / 3.0))

    nonempty = S > 0.0
    with np.errstate(invalid="ignore", divide="ignore"):
        f1_star = np.where(nonempty, num1 / np.where(nonempty, S, 1.0), np.nan)
        f2_star = np.where(nonempty, num2 / np.where(nonempty, S, 1.0), np.nan)
    S = np.where(nonempty, S, 0.0)
    return S, f1_star, f2_star, (t1p, t1m, t1, t2, t3p, t3m,
                                 s1p, s1m, s2, s3p, s3m, F1, F2, F3, F4)


def island_descriptor(m: int, n: int, k: int, f: float,
                      comb: Sequence[Channel]) -> IslandSquare:
    """Island square for the channel triple (m, n, k) at frequency f."""
    cm, cn, ck = comb[m], comb[n], comb[k]
    S, f1s, f2s, aux = island_arrays(
        cm.f_start, cm.f_end, cn.f_start, cn.f_end, ck.f_start, ck.f_end, f
    )
    (t1p, t1m, t1, t2, t3p, t3m, s1p, s1m, s2, s3p, s3m,
     F1, F2, F3, F4) = (float(a) for a in aux)
    area = float(S)
    empty = not (area > 0.0)
    side = 0.0 if empty else float(np.sqrt(area))
    return IslandSquare(
        area=area,
        f1_star=None if empty else float(f1s),
        f2_star=None if empty else float(f2s),
        L1=side,
        L2=side,
        empty=empty,
        F1=F1, F2=F2, F3=F3, F4=F4,
        tau1_plus=t1p, tau1_minus=t1m, tau1=t1, tau2=t2,
        tau3_plus=t3p, tau3_minus=t3m,
        s1_plus=s1p, s1_minus=s1m, s2=s2, s3_plus=s3p, s3_minus=s3m,
    )


def triple_class_masks(n_channels: int, cut_index: int,
                       ms: np.ndarray, ns: np.ndarray, ks: np.ndarray):
    """Boolean (sci, xci, mci) masks for index arrays of a triple batch."""
    c = cut_index
    sci = (ms == c) & (ns == c) & (ks == c)
    xci = (
        ((ms == c) & (ns == c) & (ks != c))
        | ((ms == c) & (ks == c) & (ns != c))
        | ((ns == c) & (ks == c) & (ms != c))
        | ((ms == c) & (ns == ks) & (ns != c))
        | ((ns == c) & (ms == ks) & (ms != c))
        | ((ks == c) & (ms == ns) & (ms != c))
    )
    mci = ~(sci | xci)
    return sci, xci, mci
