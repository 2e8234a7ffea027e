"""Adaptive 2-D quadrature on rectangles and convex polygons.

Each panel is evaluated on a nested Clenshaw-Curtis tensor grid (17x17 whose
every-other-node subset is the 9-point rule).  Re-weighting subsets of the
same evaluations yields four embedded estimates: full/full, low/full,
full/low and low/low.  The low/low difference is the error estimate; the
directional differences decide the split axis, so sharply anisotropic
integrands (narrow ridges along one axis) are refined where it matters.
Everything is deterministic: panels are refined in (error, insertion counter)
order, so repeated runs give identical results.

Polygon domains are fanned into triangles around the centroid and each
triangle is pulled back to the unit square through the collapsing map
(u, v) -> C + u * ((1 - v) (Vi - C) + v (Vj - C)), whose Jacobian u * 2A
removes the corner singularity of the fan.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence, Tuple

import numpy as np


def _cc_nodes_weights(n_intervals: int) -> Tuple[np.ndarray, np.ndarray]:
    """Clenshaw-Curtis nodes cos(j pi / n) on [-1, 1] and their weights.

    Weights are obtained by matching the exact Chebyshev moments
    int T_k = 2/(1-k^2) for even k (0 for odd k); the small linear system is
    solved once at import time.
    """
    n = n_intervals
    j = np.arange(n + 1)
    nodes = np.cos(j * math.pi / n)
    # V[k, j] = T_k(x_j) = cos(k j pi / n)
    k = np.arange(n + 1)
    V = np.cos(np.outer(k, j) * math.pi / n)
    moments = np.where(k % 2 == 0, 2.0 / (1.0 - k.astype(float) ** 2
                                          + np.where(k == 1, 1.0, 0.0)), 0.0)
    moments[1] = 0.0
    weights = np.linalg.lstsq(V, moments, rcond=None)[0]
    return nodes[::-1].copy(), weights[::-1].copy()


_NODES_HI, _W_HI = _cc_nodes_weights(16)   # 17 points
_LO_IDX = np.arange(0, 17, 2)              # nested 9-point subset
_, _W_LO = _cc_nodes_weights(8)


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    converged: bool
    panels: int


def _panel_estimates(f, boxes: np.ndarray):
    """Estimates for an array of boxes (N, 4): returns (value, error,
    split_axis) arrays using one 17x17 evaluation per box."""
    x0, x1, y0, y1 = boxes[:, 0], boxes[:, 1], boxes[:, 2], boxes[:, 3]
    hx = 0.5 * (x1 - x0)
    hy = 0.5 * (y1 - y0)
    cx = 0.5 * (x1 + x0)
    cy = 0.5 * (y1 + y0)
    gx = cx[:, None] + hx[:, None] * _NODES_HI[None, :]
    gy = cy[:, None] + hy[:, None] * _NODES_HI[None, :]
    vals = f(gx[:, :, None], gy[:, None, :])
    vals = np.broadcast_to(vals, (len(boxes), 17, 17))
    area = hx * hy

    q_hh = np.einsum("nij,i,j->n", vals, _W_HI, _W_HI) * area
    sub = vals[:, _LO_IDX, :]
    q_lh = np.einsum("nij,i,j->n", sub, _W_LO, _W_HI) * area
    q_hl = np.einsum("nij,i,j->n", vals[:, :, _LO_IDX], _W_HI, _W_LO) * area
    q_ll = np.einsum("nij,i,j->n", sub[:, :, _LO_IDX], _W_LO, _W_LO) * area

    err = np.abs(q_hh - q_ll)
    err_x = np.abs(q_hh - q_lh)
    err_y = np.abs(q_hh - q_hl)
    # split the axis whose low-order rule loses more; ties go to the longer side
    axis = np.where(err_x > err_y, 0,
                    np.where(err_y > err_x, 1,
                             np.where((x1 - x0) >= (y1 - y0), 0, 1)))
    return q_hh, err, axis


def integrate_box(f: Callable, x0: float, x1: float, y0: float, y1: float,
                  rel_tol: float = 1e-9, abs_tol: float = 0.0,
                  max_panels: int = 30000) -> QuadResult:
    """Adaptive integral of a vectorized integrand over a rectangle.

    ``f`` receives broadcastable coordinate arrays and must return values of
    the broadcast shape.  Convergence target: sum of panel error estimates
    <= max(rel_tol * |value|, abs_tol).
    """
    if x1 <= x0 or y1 <= y0:
        return QuadResult(0.0, 0.0, True, 0)
    boxes = np.array([[x0, x1, y0, y1]])
    values, errors, axes = _panel_estimates(f, boxes)
    counter = 1
    store = {0: (boxes[0], float(values[0]), float(errors[0]), int(axes[0]))}
    heap = [(-float(errors[0]), 0)]
    total = float(values[0])
    err_sum = float(errors[0])
    while True:
        target = max(rel_tol * abs(total), abs_tol, 5e-16 * abs(total))
        if err_sum <= target or len(store) >= max_panels:
            # recompute sums exactly before reporting
            total = math.fsum(v for (_, v, _, _) in store.values())
            err_sum = math.fsum(e for (_, _, e, _) in store.values())
            ok = err_sum <= max(rel_tol * abs(total), abs_tol,
                                5e-16 * abs(total))
            return QuadResult(total, err_sum, ok, len(store))
        batch = []
        while heap and len(batch) < 32:
            neg_err, key = heapq.heappop(heap)
            if key in store:
                if -neg_err <= 0.25 * target / max(len(store), 1) and batch:
                    heapq.heappush(heap, (neg_err, key))
                    break
                batch.append(key)
        if not batch:
            total = math.fsum(v for (_, v, _, _) in store.values())
            err_sum = math.fsum(e for (_, _, e, _) in store.values())
            return QuadResult(total, err_sum, False, len(store))
        children = []
        for key in batch:
            bx, v, e, axis = store.pop(key)
            total -= v
            err_sum -= e
            bx0, bx1, by0, by1 = bx
            if axis == 0:
                xm = 0.5 * (bx0 + bx1)
                children.append([bx0, xm, by0, by1])
                children.append([xm, bx1, by0, by1])
            else:
                ym = 0.5 * (by0 + by1)
                children.append([bx0, bx1, by0, ym])
                children.append([bx0, bx1, ym, by1])
        child_boxes = np.asarray(children)
        vals, errs, axes = _panel_estimates(f, child_boxes)
        for i in range(len(children)):
            store[counter] = (child_boxes[i], float(vals[i]),
                              float(errs[i]), int(axes[i]))
            heapq.heappush(heap, (-float(errs[i]), counter))
            total += float(vals[i])
            err_sum += float(errs[i])
            counter += 1


def polygon_centroid(vertices: Sequence[Tuple[float, float]]):
    """Signed area and centroid of a simple polygon (shoelace)."""
    area2 = 0.0
    cx = 0.0
    cy = 0.0
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        cross = x0 * y1 - x1 * y0
        area2 += cross
        cx += (x0 + x1) * cross
        cy += (y0 + y1) * cross
    if area2 == 0.0:
        return 0.0, None
    return 0.5 * area2, (cx / (3.0 * area2), cy / (3.0 * area2))


def integrate_polygon(f: Callable, vertices: Sequence[Tuple[float, float]],
                      rel_tol: float = 1e-7,
                      max_panels_per_triangle: int = 6000) -> QuadResult:
    """Adaptive integral of a vectorized integrand over a convex polygon
    (counter-clockwise vertex order)."""
    if len(vertices) < 3:
        return QuadResult(0.0, 0.0, True, 0)
    area, centroid = polygon_centroid(vertices)
    if centroid is None or area == 0.0:
        return QuadResult(0.0, 0.0, True, 0)
    cx, cy = centroid

    tris = []
    n = len(vertices)
    for i in range(n):
        x0, y0 = vertices[i]
        x1, y1 = vertices[(i + 1) % n]
        jac2 = (x0 - cx) * (y1 - cy) - (x1 - cx) * (y0 - cy)  # 2 * tri area
        if jac2 == 0.0:
            continue
        tris.append((x0, y0, x1, y1, jac2))

    def mapped(tri):
        x0, y0, x1, y1, jac2 = tri

        def g(u, v):
            px = cx + u * ((1.0 - v) * (x0 - cx) + v * (x1 - cx))
            py = cy + u * ((1.0 - v) * (y0 - cy) + v * (y1 - cy))
            return f(px, py) * u * jac2

        return g

    # coarse pass fixes the absolute budget shared by the triangles
    coarse = 0.0
    unit = np.array([[0.0, 1.0, 0.0, 1.0]])
    for tri in tris:
        v, _, _ = _panel_estimates(mapped(tri), unit)
        coarse += float(v[0])

    value = 0.0
    err = 0.0
    panels = 0
    converged = True
    abs_budget = rel_tol * max(abs(coarse), 1e-300) / max(len(tris), 1)
    for tri in tris:
        r = integrate_box(mapped(tri), 0.0, 1.0, 0.0, 1.0,
                          rel_tol=rel_tol, abs_tol=abs_budget,
                          max_panels=max_panels_per_triangle)
        value += r.value
        err += r.error
        panels += r.panels
        converged = converged and r.converged
    return QuadResult(value, err, converged, panels)
