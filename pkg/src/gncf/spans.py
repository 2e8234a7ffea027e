"""Per-span effective parameters and link-function factors.

The frequency-resolved loss alpha0(f) + alpha1(f) exp(-sigma(f) z) enters the
kernel only through three effective scalars per (span, evaluation point):
an averaged flat part ``alpha0_bar``, and a single-exponential surrogate
``alpha1_bar * exp(-sigma_bar z)`` fitted to the four-point combination of the
Raman terms.  The squared kernel then decomposes exactly into two Lorentzians
in the product (f1 - f)(f2 - f), with weights J1/J2 and width coefficients
D1_bar/D2_bar.

Fit convention for (alpha1_bar, sigma_bar): the surrogate matches the target
combination exactly at z = 0, and its integral over the span equals the
target's integral (bisection on the monotone ratio (1 - e^-u)/u).  If the
target changes sign along the span a single exponential cannot represent it;
a ModelValidityWarning is emitted and the fit proceeds on |target| with the
sign carried by alpha1_bar.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from .exceptions import ModelDomainError, ModelValidityWarning
from .model import Channel, Link, Span

__all__ = [
    "EffectiveSpanParams",
    "effective_alpha0",
    "fit_effective_raman",
    "beta2_bar",
    "lorentzian_coefficients",
    "effective_span_params",
    "xi_squared_direct",
    "g0",
    "g0_flat",
    "field_log_transfer",
    "psd_at_span",
]


@dataclass(frozen=True)
class EffectiveSpanParams:
    """Effective kernel parameters of one span at one evaluation point."""

    alpha0_bar: float   # Np/m
    alpha1_bar: float   # Np/m
    sigma_bar: float    # 1/m
    beta2_bar: float    # s^2/m
    J1: float           # m^2
    J2: float           # m^2
    D1_bar: float       # 1/Hz^2
    D2_bar: float       # 1/Hz^2


def effective_alpha0(span: Span, f1s, f2s, f):
    """(alpha0(f1*) + alpha0(f2*) + alpha0(f3*) - alpha0(f)) / 2 with
    f3* = f1* + f2* - f.  Array-friendly in f1s/f2s."""
    f3s = np.asarray(f1s) + np.asarray(f2s) - f
    out = 0.5 * (span.alpha0(f1s) + span.alpha0(f2s)
                 + span.alpha0(f3s) - span.alpha0(f))
    return out


def beta2_bar(span: Span, fa, fb):
    """Local group-velocity-dispersion coefficient for the summed evaluation
    frequencies (fa, fb): beta2 + pi*beta3*(fa + fb - 2*fc).  Symmetric."""
    return span.beta2 + math.pi * span.beta3 * (np.asarray(fa) + np.asarray(fb)
                                                - 2.0 * span.fc)


def _ell_ratio(u):
    """(1 - exp(-u)) / u, continuous through u = 0; strictly decreasing."""
    u = np.asarray(u, dtype=float)
    small = np.abs(u) < 1e-8
    us = np.where(small, 0.0, u)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        big = -np.expm1(-us) / np.where(small, 1.0, us)
    ser = 1.0 - u / 2.0 + u * u / 6.0
    return np.where(small, ser, big)


_U_MAX = 745.0  # exp underflow boundary


def _solve_ell_ratio(q):
    """Solve (1 - exp(-u)) / u = q for u (vectorized bisection).

    q > 1 gives u < 0 (growing surrogate), q < 1 gives u > 0.  100 fixed
    bisection steps on a monotone bracket; relative accuracy is better than
    1e-12 for any |u| of practical size.
    """
    q = np.asarray(q, dtype=float)
    lo = np.where(q >= 1.0, -_U_MAX, 0.0)
    hi = np.where(q >= 1.0, 0.0, _U_MAX)
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        too_high = _ell_ratio(mid) > q     # h decreasing: root is above mid
        lo = np.where(too_high, mid, lo)
        hi = np.where(too_high, hi, mid)
    return 0.5 * (lo + hi)


def _raman_terms(span: Span, f1s, f2s, f):
    """Coefficients and rates of the four-point Raman combination.

    target(z) = sum_i c_i exp(-r_i z) with the (+, +, -, +)/2 sign pattern on
    evaluation points (f1*, f2*, f, f3*).
    """
    f3s = np.asarray(f1s) + np.asarray(f2s) - f
    pts = (f1s, f2s, f, f3s)
    signs = (0.5, 0.5, -0.5, 0.5)
    coeffs = [s * span.alpha1(p) for s, p in zip(signs, pts)]
    rates = [span.sigma(p) + np.zeros_like(np.asarray(c, dtype=float))
             for c, p in zip(coeffs, pts)]
    return coeffs, rates


def fit_effective_raman(span: Span, f1s: float, f2s: float,
                        f: float) -> Tuple[float, float]:
    """Effective (alpha1_bar, sigma_bar) for one span and evaluation point.

    Returns (0, 0) when all four Raman terms vanish.
    """
    coeffs, rates = _raman_terms(span, f1s, f2s, f)
    coeffs = [float(c) for c in coeffs]
    rates = [float(r) for r in rates]
    if all(c == 0.0 for c in coeffs):
        return 0.0, 0.0
    L = span.length
    a1_bar = math.fsum(coeffs)

    def target(z):
        return math.fsum(c * math.exp(-r * z) for c, r in zip(coeffs, rates))

    zs = np.linspace(0.0, L, 65)
    vals = np.array([target(z) for z in zs])
    sign_change = np.any(vals > 0.0) and np.any(vals < 0.0)

    if a1_bar == 0.0:
        warnings.warn(
            "Raman surrogate unfittable (combination vanishes at z = 0); "
            "dropping the effective Raman term for this evaluation point",
            ModelValidityWarning, stacklevel=2,
        )
        return 0.0, 0.0

    if sign_change:
        warnings.warn(
            "four-point Raman combination changes sign along the span; "
            "single-exponential surrogate fitted to its absolute value",
            ModelValidityWarning, stacklevel=2,
        )
        # composite Simpson on |target|
        ngrid = 1025
        zg = np.linspace(0.0, L, ngrid)
        vg = np.abs([target(z) for z in zg])
        h = L / (ngrid - 1)
        integral = h / 3.0 * (vg[0] + vg[-1] + 4.0 * vg[1:-1:2].sum()
                              + 2.0 * vg[2:-2:2].sum())
        q = integral / abs(a1_bar)
    else:
        integral = math.fsum(c * L * float(_ell_ratio(r * L))
                             for c, r in zip(coeffs, rates))
        q = integral / a1_bar
        if q <= 0.0:
            warnings.warn(
                "Raman surrogate integral matching failed (non-positive "
                "ratio); dropping the effective Raman term",
                ModelValidityWarning, stacklevel=2,
            )
            return 0.0, 0.0
    u = float(_solve_ell_ratio(q / L))
    return a1_bar, u / L


def fit_effective_raman_arrays(span: Span, f1s: np.ndarray, f2s: np.ndarray,
                               f: float) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized fit for batches of evaluation points.

    Sign-changing points fall back to the |target| integral (Simpson grid);
    a single aggregated warning is emitted for them.
    """
    f1s = np.asarray(f1s, dtype=float)
    if not span.has_raman_term:
        z = np.zeros_like(f1s)
        return z, z.copy()
    coeffs, rates = _raman_terms(span, f1s, f2s, f)
    coeffs = [np.broadcast_to(np.asarray(c, float), f1s.shape) for c in coeffs]
    rates = [np.broadcast_to(np.asarray(r, float), f1s.shape) for r in rates]
    L = span.length
    a1_bar = coeffs[0] + coeffs[1] + coeffs[2] + coeffs[3]

    zs = np.linspace(0.0, L, 65)
    vals = sum(c[..., None] * np.exp(-r[..., None] * zs)
               for c, r in zip(coeffs, rates))
    sign_change = np.any(vals > 0.0, axis=-1) & np.any(vals < 0.0, axis=-1)

    integral = sum(c * L * _ell_ratio(r * L) for c, r in zip(coeffs, rates))
    if np.any(sign_change):
        warnings.warn(
            f"{int(np.count_nonzero(sign_change))} evaluation point(s) with a "
            "sign-changing Raman combination; surrogate fitted to |target|",
            ModelValidityWarning, stacklevel=2,
        )
        zg = np.linspace(0.0, L, 1025)
        idx = np.nonzero(sign_change)
        vg = sum(c[idx][..., None] * np.exp(-r[idx][..., None] * zg)
                 for c, r in zip(coeffs, rates))
        h = L / (len(zg) - 1)
        simpson = h / 3.0 * (np.abs(vg[..., 0]) + np.abs(vg[..., -1])
                             + 4.0 * np.abs(vg[..., 1:-1:2]).sum(axis=-1)
                             + 2.0 * np.abs(vg[..., 2:-2:2]).sum(axis=-1))
        integral = integral.copy()
        integral[idx] = simpson

    fittable = a1_bar != 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        q = np.where(fittable, integral, 1.0) / np.where(fittable, a1_bar, 1.0)
    q = np.where(sign_change, np.abs(q), q)
    bad = fittable & (q <= 0.0)
    if np.any(bad):
        warnings.warn(
            f"{int(np.count_nonzero(bad))} evaluation point(s) with an "
            "unfittable Raman surrogate; dropping their effective Raman term",
            ModelValidityWarning, stacklevel=2,
        )
    ok = fittable & (q > 0.0)
    u = _solve_ell_ratio(np.where(ok, q, L) / L)
    sigma_bar = np.where(ok, u / L, 0.0)
    alpha1_bar = np.where(ok, a1_bar, 0.0)
    return alpha1_bar, sigma_bar


def lorentzian_coefficients(alpha0_bar, alpha1_bar, sigma_bar, beta2_bar_val):
    """Two-Lorentzian weights and width coefficients (J1, J2, D1, D2).

    With no Raman term (alpha1_bar = 0) this reduces to J1 = 0,
    J2 = 1/(4 alpha0_bar^2), D2 = 2 pi^2 beta2_bar / alpha0_bar.
    Rejects alpha0_bar <= 0 (net in-span gain is outside the model).
    """
    a0 = np.asarray(alpha0_bar, dtype=float)
    a1 = np.asarray(alpha1_bar, dtype=float)
    s = np.asarray(sigma_bar, dtype=float)
    b2 = np.asarray(beta2_bar_val, dtype=float)
    if np.any(a0 <= 0.0):
        raise ModelDomainError(
            "effective alpha0 must be positive (in-span power must decay)"
        )
    flat = a1 == 0.0
    s_safe = np.where(flat, 1.0, s)
    J1 = np.where(
        flat, 0.0,
        4.0 * a1 * (2.0 * a0 - a1 + s)
        / (s_safe * (2.0 * a0 + s) ** 2 * (4.0 * a0 + s)),
    )
    J2 = np.where(
        flat,
        1.0 / (4.0 * a0 * a0),
        (s - 2.0 * a1) * (4.0 * a0 - 2.0 * a1 + s)
        / (4.0 * s_safe * a0 * a0 * (4.0 * a0 + s)),
    )
    D1 = 4.0 * math.pi**2 * b2 / (2.0 * a0 + s)
    D2 = 2.0 * math.pi**2 * b2 / a0
    return J1, J2, D1, D2


def effective_span_params(span: Span, f1s: float, f2s: float, f: float,
                          cache: Optional[Dict] = None,
                          cache_key=None) -> EffectiveSpanParams:
    """All effective parameters of one span at one evaluation point."""
    if cache is not None and cache_key is not None:
        hit = cache.get(cache_key)
        if hit is not None:
            return hit
    a0 = float(effective_alpha0(span, f1s, f2s, f))
    a1, s = fit_effective_raman(span, f1s, f2s, f)
    b2 = float(beta2_bar(span, f1s, f2s))
    J1, J2, D1, D2 = (float(v) for v in lorentzian_coefficients(a0, a1, s, b2))
    params = EffectiveSpanParams(a0, a1, s, b2, J1, J2, D1, D2)
    if cache is not None and cache_key is not None:
        cache[cache_key] = params
    return params


def xi_squared_direct(params: EffectiveSpanParams, f1, f2, f):
    """|kernel|^2 by direct complex arithmetic (validation path).

    Must agree with the two-Lorentzian decomposition pointwise.
    """
    theta = 4.0 * math.pi**2 * (np.asarray(f1) - f) * (np.asarray(f2) - f) \
        * params.beta2_bar
    d1 = 2.0 * params.alpha0_bar - 1j * theta
    d2 = 2.0 * params.alpha0_bar + params.sigma_bar - 1j * theta
    xi = 1.0 / d1 - 2.0 * params.alpha1_bar / (d1 * d2)
    return np.abs(xi) ** 2


def _raman_log(span: Span, x):
    """Field log-attenuation contributed by the Raman term over the span:
    (alpha1(x)/sigma(x)) * (exp(-sigma(x) L) - 1); 0 where alpha1(x) = 0."""
    a1 = np.asarray(span.alpha1(x), dtype=float)
    if not span.has_raman_term:
        return np.zeros_like(a1)
    s = np.asarray(span.sigma(x), dtype=float)
    s_safe = np.where(a1 == 0.0, 1.0, s)
    return np.where(a1 == 0.0, 0.0,
                    a1 / s_safe * np.expm1(-s_safe * span.length))


def field_log_transfer(span: Span, x):
    """ln of the field transfer of one span plus its amplifier at frequency x:
    0.5 ln Gamma(x) - L alpha0(x) + raman_log(x)."""
    return (0.5 * np.log(span.gain(x)) - span.length * span.alpha0(x)
            + _raman_log(span, x))


def g0(link: Link, n_s: int, f1s: float, f2s: float, f: float,
       include_current_span: bool = True) -> float:
    """Power-normalization factor of span ``n_s`` (1-based) at the island
    centroid (f1*, f2*) and evaluation frequency f.

    First factor: field transfer of the three pump frequencies through spans
    1..n_s-1 (fiber + amplifier).  Second factor: from span n_s to the link
    end, the field attenuation of f through each fiber *divided by* that
    span's amplifier field gain - the printed convention, which includes span
    n_s's own loss.  ``include_current_span=False`` is a diagnostic toggle
    that starts the second factor at n_s + 1 instead.
    """
    if not (1 <= n_s <= link.n_spans):
        raise ValueError(f"span index {n_s} out of range")
    f3s = f1s + f2s - f
    log_total = 0.0
    for p in range(0, n_s - 1):
        span = link.spans[p]
        log_total += float(field_log_transfer(span, f1s)
                           + field_log_transfer(span, f2s)
                           + field_log_transfer(span, f3s))
    start = n_s - 1 if include_current_span else n_s
    for p in range(start, link.n_spans):
        span = link.spans[p]
        log_total += float(field_log_transfer(span, f)
                           - math.log(float(span.gain(f))))
    return math.exp(log_total)


def g0_flat(link: Link, n_s: int, f1s: float, f2s: float, f: float) -> float:
    """Flat-loss specialization of :func:`g0` (constant alpha0, no Raman
    term); used when the whole link is flat-loss."""
    if not (1 <= n_s <= link.n_spans):
        raise ValueError(f"span index {n_s} out of range")
    f3s = f1s + f2s - f
    log_total = 0.0
    for p in range(0, n_s - 1):
        span = link.spans[p]
        a0 = span.alpha0.values[0]
        log_total += 0.5 * math.log(float(span.gain(f1s)) * float(span.gain(f2s))
                                    * float(span.gain(f3s)))
        log_total += -3.0 * a0 * span.length
    for p in range(n_s - 1, link.n_spans):
        span = link.spans[p]
        a0 = span.alpha0.values[0]
        log_total += -0.5 * math.log(float(span.gain(f))) - a0 * span.length
    return math.exp(log_total)


def psd_at_span(link: Link, channel: Channel, n_s: int, f_eval: float) -> float:
    """Launch PSD of ``channel`` scaled to the entrance of span ``n_s``
    (1-based); diagnostic only, the NLI formulas fold propagation into g0."""
    if not (1 <= n_s <= link.n_spans):
        raise ValueError(f"span index {n_s} out of range")
    log_scale = 0.0
    for p in range(0, n_s - 1):
        span = link.spans[p]
        log_scale += 2.0 * float(field_log_transfer(span, f_eval))
    return channel.psd * math.exp(log_scale)
