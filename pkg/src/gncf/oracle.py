"""Independent brute-force validators for the closed-form engine.

Nothing here shares code with the island-geometry or engine modules: islands
are rebuilt as exact clipped polygons, island integrals are evaluated by
adaptive quadrature (over the equivalent square and over the true polygon),
and the dilogarithm kernel is recomputed from the complex power series with
the Landen and inversion identities.  Span-level effective parameters are the
one shared ingredient (they are validated separately against the direct
complex kernel).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from .model import Link
from .quad2d import QuadResult, integrate_box, integrate_polygon, polygon_centroid
from .spans import effective_span_params, g0

__all__ = [
    "IslandPolygon",
    "island_polygon_exact",
    "gn_quadrature_square",
    "gn_quadrature_true_island",
    "dilog_series",
]


@dataclass(frozen=True)
class IslandPolygon:
    """Exact integration island: a rectangle clipped by the two half-planes
    lo <= f1 + f2 <= hi.  Vertices are counter-clockwise; empty islands have
    area 0 and no centroid."""

    vertices: Tuple[Tuple[float, float], ...]
    area: float
    centroid: Optional[Tuple[float, float]]


def _clip_halfplane(poly, a, b, c):
    """Sutherland-Hodgman step: keep the side a*x + b*y <= c."""
    if not poly:
        return []
    out = []
    n = len(poly)
    for i in range(n):
        sx, sy = poly[i]
        ex, ey = poly[(i + 1) % n]
        ds = a * sx + b * sy - c
        de = a * ex + b * ey - c
        if ds <= 0.0:
            out.append((sx, sy))
            if de > 0.0:
                t = ds / (ds - de)
                out.append((sx + t * (ex - sx), sy + t * (ey - sy)))
        elif de <= 0.0:
            t = ds / (ds - de)
            out.append((sx + t * (ex - sx), sy + t * (ey - sy)))
    return out


def island_polygon_exact(m: int, n: int, k: int, f: float,
                         comb) -> IslandPolygon:
    """Clip [f_start_m, f_end_m] x [f_start_n, f_end_n] by
    f_start_k + f <= f1 + f2 <= f_end_k + f; shoelace area and centroid.

    Coordinates are translated to the rectangle corner before clipping so the
    shoelace sums act on spectrally small numbers; the translation is undone
    on the returned vertices/centroid.
    """
    cm, cn, ck = comb[m], comb[n], comb[k]
    ox, oy = cm.f_start, cn.f_start
    poly = [
        (0.0, 0.0),
        (cm.f_end - ox, 0.0),
        (cm.f_end - ox, cn.f_end - oy),
        (0.0, cn.f_end - oy),
    ]
    lo = (ck.f_start + f) - ox - oy
    hi = (ck.f_end + f) - ox - oy
    poly = _clip_halfplane(poly, 1.0, 1.0, hi)
    poly = _clip_halfplane(poly, -1.0, -1.0, -lo)
    if len(poly) < 3:
        return IslandPolygon((), 0.0, None)
    # re-translate to the first vertex: keeps the shoelace well conditioned
    # even for knife-edge slivers much smaller than the channel rectangle
    vx, vy = poly[0]
    local = [(x - vx, y - vy) for x, y in poly]
    area, centroid = polygon_centroid(local)
    if centroid is None or area == 0.0:
        return IslandPolygon((), 0.0, None)
    if area < 0.0:  # defensive: inputs are CCW, clipping preserves orientation
        local = local[::-1]
        area, centroid = polygon_centroid(local)
    return IslandPolygon(
        vertices=tuple((x + ox, y + oy) for x, y in poly),
        area=area,
        centroid=(centroid[0] + vx + ox, centroid[1] + vy + oy),
    )


def _triple_weight(link: Link, triple) -> float:
    m, n, k = triple
    return (16.0 / 27.0) * link.comb[m].psd * link.comb[n].psd * link.comb[k].psd


def _span_terms(link: Link, f1s: float, f2s: float, f: float):
    """(gamma^2 g0^2, J1, J2, D1, D2) per span at the island centroid."""
    out = []
    for ns in range(1, link.n_spans + 1):
        span = link.spans[ns - 1]
        eff = effective_span_params(span, f1s, f2s, f)
        weight = span.gamma**2 * g0(link, ns, f1s, f2s, f) ** 2
        out.append((weight, eff.J1, eff.J2, eff.D1_bar, eff.D2_bar))
    return out


def _lorentzian_sum_integrand(terms, f: float):
    def integrand(f1, f2):
        x = (f1 - f) * (f2 - f)
        x2 = x * x
        total = 0.0
        for weight, J1, J2, D1, D2 in terms:
            if J1 != 0.0:
                total = total + weight * J1 / (1.0 + x2 * D1 * D1)
            total = total + weight * J2 / (1.0 + x2 * D2 * D2)
        return total

    return integrand


def gn_quadrature_square(link: Link, f: float, triple,
                         rel_tol: float = 1e-9) -> QuadResult:
    """Contribution of one channel triple via adaptive quadrature of the
    two-Lorentzian integrand over the equivalent square (W/Hz).

    The square is derived from the exact polygon's own area and centroid, so
    this path never touches the closed-form island formulas.
    """
    m, n, k = triple
    poly = island_polygon_exact(m, n, k, f, link.comb)
    if poly.area == 0.0:
        return QuadResult(0.0, 0.0, True, 0)
    side = math.sqrt(poly.area)
    f1c, f2c = poly.centroid
    terms = _span_terms(link, f1c, f2c, f)
    integrand = _lorentzian_sum_integrand(terms, f)
    r = integrate_box(
        integrand,
        f1c - 0.5 * side, f1c + 0.5 * side,
        f2c - 0.5 * side, f2c + 0.5 * side,
        rel_tol=rel_tol,
    )
    w = _triple_weight(link, triple)
    return QuadResult(w * r.value, w * r.error, r.converged, r.panels)


def gn_quadrature_true_island(link: Link, f: float, triple,
                              rel_tol: float = 1e-7) -> QuadResult:
    """Contribution of one channel triple via adaptive quadrature of the
    two-Lorentzian integrand over the exact island polygon (W/Hz)."""
    m, n, k = triple
    poly = island_polygon_exact(m, n, k, f, link.comb)
    if poly.area == 0.0:
        return QuadResult(0.0, 0.0, True, 0)
    f1c, f2c = poly.centroid
    terms = _span_terms(link, f1c, f2c, f)
    integrand = _lorentzian_sum_integrand(terms, f)
    r = integrate_polygon(integrand, poly.vertices, rel_tol=rel_tol)
    w = _triple_weight(link, triple)
    return QuadResult(w * r.value, w * r.error, r.converged, r.panels)


# --- independent dilogarithm ------------------------------------------------

def _li2_series(z: complex) -> complex:
    total = 0j
    term = z
    k = 1
    while True:
        total += term / (k * k)
        k += 1
        term *= z
        if abs(term) / (k * k) < 1e-19 * max(abs(total), 1e-30):
            return total
        if k > 4000:  # |z| <= 0.71 converges in ~120 terms
            raise RuntimeError("dilogarithm series failed to converge")


def _im_li2_on_axis(x: float) -> float:
    # Im Li2(j x) for 0 <= x <= 1
    z = complex(0.0, x)
    if x <= 0.5:
        return _li2_series(z).imag
    # Landen: Li2(z) = -Li2(z / (z - 1)) - ln(1 - z)^2 / 2
    w = z / (z - 1.0)
    return (-_li2_series(w) - 0.5 * cmath.log(1.0 - z) ** 2).imag


def dilog_series(x: float) -> float:
    """2 * Im Li2(j x) from the complex power series plus the Landen and
    inversion identities; reference for the accelerated primary kernel."""
    if not math.isfinite(x):
        raise ValueError(f"dilog_series requires finite input, got {x!r}")
    if x < 0.0:
        return -dilog_series(-x)
    if x <= 1.0:
        return 2.0 * _im_li2_on_axis(x)
    return math.pi * math.log(x) + 2.0 * _im_li2_on_axis(1.0 / x)
