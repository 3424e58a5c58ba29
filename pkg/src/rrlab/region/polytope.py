"""Closed convex polygons in the (R1, R2) rate plane."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..errors import UnboundedRegion

TOL_GEO = 1e-6
_MERGE = 1e-10
_BIG = 1e6


def _cross(o, a, b) -> float:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points: Iterable[Sequence[float]]) -> list[tuple[float, float]]:
    """Monotone-chain hull, counter-clockwise, collinear points removed."""
    # adding 0.0 folds -0.0 into 0.0 so printed output is stable
    pts = sorted({(float(x) + 0.0, float(y) + 0.0) for x, y in points})
    merged: list[tuple[float, float]] = []
    for p in pts:
        if not any(abs(p[0] - q[0]) <= _MERGE and abs(p[1] - q[1]) <= _MERGE for q in merged):
            merged.append(p)
    pts = sorted(merged)
    if len(pts) <= 2:
        return pts

    # exact orientation here; a tolerance at this stage can drop a true
    # extreme point when nearly collinear points sort out of line order
    def half(seq):
        out: list[tuple[float, float]] = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(reversed(pts))
    hull = lower[:-1] + upper[:-1]
    # then drop vertices lying (within round-off) on the segment of their neighbours
    changed = True
    while changed and len(hull) > 2:
        changed = False
        for i in range(len(hull)):
            a, b, c = hull[i - 1], hull[i], hull[(i + 1) % len(hull)]
            if abs(_cross(a, b, c)) <= 1e-12 and (b[0] - a[0]) * (c[0] - b[0]) + (b[1] - a[1]) * (c[1] - b[1]) >= 0:
                del hull[i]
                changed = True
                break
    return hull


@dataclass(frozen=True)
class RatePolytope:
    """Convex polygon given by counter-clockwise vertices.

    ``halfplanes`` rows ``(a1, a2, c)`` mean ``a1*R1 + a2*R2 <= c`` with unit
    normals.  A point or a segment is described by enough halfplanes to pin
    it down; the empty region has no vertices and no halfplanes.
    """

    vertices: tuple[tuple[float, float], ...]
    halfplanes: tuple[tuple[float, float, float], ...]

    @classmethod
    def empty(cls) -> "RatePolytope":
        return cls((), ())

    @classmethod
    def from_points(cls, points: Iterable[Sequence[float]]) -> "RatePolytope":
        hull = convex_hull(points)
        return cls(tuple(hull), tuple(_halfplanes_of(hull)))

    @property
    def is_empty(self) -> bool:
        return not self.vertices

    def contains_point(self, pt, tol: float = TOL_GEO) -> bool:
        if self.is_empty:
            return False
        return all(a1 * pt[0] + a2 * pt[1] <= c + tol for a1, a2, c in self.halfplanes)

    def scaled(self, lam: float) -> "RatePolytope":
        return RatePolytope.from_points([(lam * x, lam * y) for x, y in self.vertices])

    def max_r1(self) -> float:
        return max((v[0] for v in self.vertices), default=float("nan"))

    def max_r2(self) -> float:
        return max((v[1] for v in self.vertices), default=float("nan"))

    def max_sum(self) -> float:
        return max((v[0] + v[1] for v in self.vertices), default=float("nan"))

    def __str__(self) -> str:
        if self.is_empty:
            return "EMPTY"
        return " ".join(f"({x:.6g},{y:.6g})" for x, y in self.vertices)


def _unit_row(nx: float, ny: float, p) -> tuple[float, float, float]:
    n = np.hypot(nx, ny)
    nx, ny = nx / n, ny / n
    return (float(nx) + 0.0, float(ny) + 0.0, float(nx * p[0] + ny * p[1]) + 0.0)


def _halfplanes_of(hull: list[tuple[float, float]]) -> list[tuple[float, float, float]]:
    if not hull:
        return []
    if len(hull) == 1:
        p = hull[0]
        return [(1.0, 0.0, p[0]), (-1.0, 0.0, -p[0]), (0.0, 1.0, p[1]), (0.0, -1.0, -p[1])]
    if len(hull) == 2:
        p, q = hull
        dx, dy = q[0] - p[0], q[1] - p[1]
        return [
            _unit_row(dy, -dx, p),
            _unit_row(-dy, dx, p),
            _unit_row(dx, dy, q),
            _unit_row(-dx, -dy, p),
        ]
    rows = []
    for i, p in enumerate(hull):
        q = hull[(i + 1) % len(hull)]
        # counter-clockwise order: outward normal is (dy, -dx)
        rows.append(_unit_row(q[1] - p[1], -(q[0] - p[0]), p))
    return rows


def polygon_from_halfplanes(rows: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> RatePolytope:
    """Polygon {x >= 0 : rows @ x <= b} by pairwise line intersection.

    Raises ``UnboundedRegion`` if the region is unbounded.
    """
    rows = np.asarray(rows, dtype=float).reshape(-1, 2)
    b = np.asarray(b, dtype=float).ravel()
    extra = np.array([[-1.0, 0.0], [0.0, -1.0], [1.0, 0.0], [0.0, 1.0]])
    A = np.vstack([rows, extra])
    c = np.concatenate([b, [0.0, 0.0, _BIG, _BIG]])
    scale = np.maximum(np.abs(A).max(axis=1), 1e-300)
    pts = []
    m = len(A)
    for i in range(m):
        for j in range(i + 1, m):
            M = A[[i, j]]
            det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
            if abs(det) < 1e-14:
                continue
            x = (c[i] * M[1, 1] - c[j] * M[0, 1]) / det
            y = (M[0, 0] * c[j] - M[1, 0] * c[i]) / det
            if np.all(A @ np.array([x, y]) <= c + tol * np.maximum(scale, 1.0)):
                pts.append((max(x, 0.0), max(y, 0.0)))
    if not pts:
        return RatePolytope.empty()
    if any(x > _BIG / 2 or y > _BIG / 2 for x, y in pts):
        raise UnboundedRegion("projected region is unbounded")
    return RatePolytope.from_points(pts)


def polytope_contains(outer: RatePolytope, inner: RatePolytope, tol: float = TOL_GEO) -> bool:
    if inner.is_empty:
        return True
    if outer.is_empty:
        return False
    return all(outer.contains_point(v, tol) for v in inner.vertices)


def containment_violations(outer: RatePolytope, inner: RatePolytope, tol: float = TOL_GEO):
    """List of ``(vertex, halfplane, excess)`` for inner vertices outside outer."""
    out = []
    if inner.is_empty:
        return out
    if outer.is_empty:
        return [(v, None, float("inf")) for v in inner.vertices]
    for v in inner.vertices:
        worst = max(outer.halfplanes, key=lambda h: h[0] * v[0] + h[1] * v[1] - h[2])
        excess = worst[0] * v[0] + worst[1] * v[1] - worst[2]
        if excess > tol:
            out.append((v, worst, excess))
    return out


def union_hull(polys: Sequence[RatePolytope]) -> RatePolytope:
    if not polys:
        raise ValueError("union_hull needs at least one polytope")
    return RatePolytope.from_points([v for p in polys for v in p.vertices])


def _seg_dist(pt, a, b) -> float:
    p, a, b = np.asarray(pt), np.asarray(a), np.asarray(b)
    d = b - a
    L = float(d @ d)
    t = 0.0 if L == 0 else min(1.0, max(0.0, float((p - a) @ d) / L))
    return float(np.hypot(*(p - (a + t * d))))


def point_distance(pt, poly: RatePolytope) -> float:
    """Euclidean distance from ``pt`` to the polygon (0 inside)."""
    if poly.is_empty:
        return float("inf")
    vs = poly.vertices
    if len(vs) >= 3 and poly.contains_point(pt, tol=1e-12):
        return 0.0
    if len(vs) == 1:
        return float(np.hypot(pt[0] - vs[0][0], pt[1] - vs[0][1]))
    return min(_seg_dist(pt, vs[i], vs[(i + 1) % len(vs)]) for i in range(len(vs)))


def hausdorff(p: RatePolytope, q: RatePolytope) -> float:
    """Exact Hausdorff distance between convex polygons.

    The farthest point of one convex set from another convex set is a
    vertex, so checking vertices against the other polygon suffices.
    """
    if p.is_empty and q.is_empty:
        return 0.0
    if p.is_empty or q.is_empty:
        return float("inf")
    d1 = max(point_distance(v, q) for v in p.vertices)
    d2 = max(point_distance(v, p) for v in q.vertices)
    return max(d1, d2)
