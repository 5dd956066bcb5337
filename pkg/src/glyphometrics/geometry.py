"""Numeric kernel: B-spline curves, curvature, hulls, circles, simplification.

All coordinates are canonical y-up; angles are counterclockwise degrees from
the +x axis in [0, 360). Polylines are (n, 2) float arrays throughout.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy import signal
from scipy.interpolate import BSpline, make_interp_spline, make_lsq_spline

from .errors import CurvatureUndefinedError, InvalidInputError

__all__ = [
    "Point",
    "SplineSegment",
    "Circle",
    "Rect",
    "fit_spline",
    "arc_length",
    "curvature_at",
    "curvature_profile",
    "curvature_extrema",
    "convex_hull",
    "min_enclosing_circle",
    "rdp_simplify",
    "count_crossings",
    "polyline_length",
    "polygon_area",
    "angle_deg",
    "as_point_array",
]


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise InvalidInputError(f"non-finite point ({self.x}, {self.y})")

    def as_tuple(self) -> tuple[float, float]:
        return (self.x, self.y)


def as_point_array(points) -> np.ndarray:
    """Coerce a sequence of Point / pairs / an (n,2) array to a float array."""
    if isinstance(points, np.ndarray):
        arr = np.asarray(points, dtype=float)
    else:
        arr = np.array(
            [(p.x, p.y) if isinstance(p, Point) else (p[0], p[1]) for p in points],
            dtype=float,
        ).reshape(-1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InvalidInputError("expected an (n, 2) point array")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("non-finite coordinates in point list")
    return arr


@dataclass(frozen=True)
class SplineSegment:
    """A cubic B-spline curve segment with clamped or general knots."""

    degree: int
    control_points: tuple[Point, ...]
    knots: tuple[float, ...]

    def __post_init__(self):
        if self.degree != 3:
            raise InvalidInputError("only cubic (degree 3) segments are supported")
        if len(self.knots) != len(self.control_points) + self.degree + 1:
            raise InvalidInputError(
                "knot count must equal control-point count + degree + 1"
            )
        if any(b < a for a, b in zip(self.knots, self.knots[1:])):
            raise InvalidInputError("knots must be non-decreasing")
        pts = {(p.x, p.y) for p in self.control_points}
        if len(pts) < 2:
            raise InvalidInputError("need at least 2 distinct control points")

    @classmethod
    def from_arrays(cls, control_points, knots, degree: int = 3) -> "SplineSegment":
        ctrl = as_point_array(control_points)
        return cls(
            degree=degree,
            control_points=tuple(Point(float(x), float(y)) for x, y in ctrl),
            knots=tuple(float(k) for k in knots),
        )

    @classmethod
    def line(cls, p0, p1) -> "SplineSegment":
        """Degenerate straight segment expressed as a clamped cubic."""
        a = np.asarray([p0.x, p0.y] if isinstance(p0, Point) else p0, dtype=float)
        b = np.asarray([p1.x, p1.y] if isinstance(p1, Point) else p1, dtype=float)
        ctrl = np.array([a, a + (b - a) / 3.0, a + 2.0 * (b - a) / 3.0, b])
        return cls.from_arrays(ctrl, (0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0))

    # -- evaluation ---------------------------------------------------------

    def _spline(self) -> BSpline:
        cached = self.__dict__.get("_bspline")
        if cached is None:
            c = np.array([(p.x, p.y) for p in self.control_points], dtype=float)
            cached = BSpline(np.asarray(self.knots, dtype=float), c, self.degree)
            object.__setattr__(self, "_bspline", cached)
        return cached

    @property
    def domain(self) -> tuple[float, float]:
        k = self.degree
        return (self.knots[k], self.knots[len(self.knots) - k - 1])

    def _u(self, t):
        lo, hi = self.domain
        return lo + np.asarray(t, dtype=float) * (hi - lo)

    def point_at(self, t) -> np.ndarray:
        """Evaluate at normalized parameter t in [0, 1]."""
        return np.asarray(self._spline()(self._u(t)), dtype=float)

    def derivatives_at(self, t, order: int) -> np.ndarray:
        lo, hi = self.domain
        scale = (hi - lo) ** order
        return np.asarray(self._spline().derivative(order)(self._u(t)), dtype=float) * scale

    def sample(self, n: int) -> np.ndarray:
        """n uniform-parameter samples as an (n, 2) array."""
        if n < 2:
            raise InvalidInputError("need at least 2 samples")
        return self.point_at(np.linspace(0.0, 1.0, n))


@dataclass(frozen=True)
class Circle:
    center: Point
    radius: float

    def __post_init__(self):
        if not math.isfinite(self.radius) or self.radius < 0:
            raise InvalidInputError("circle radius must be finite and non-negative")

    def contains(self, p, slack: float = 1e-9) -> bool:
        arr = as_point_array([p])[0]
        return math.hypot(arr[0] - self.center.x, arr[1] - self.center.y) <= self.radius + slack


@dataclass(frozen=True)
class Rect:
    min: Point
    max: Point

    def __post_init__(self):
        if self.min.x > self.max.x or self.min.y > self.max.y:
            raise InvalidInputError("rect min must not exceed max")

    @property
    def width(self) -> float:
        return self.max.x - self.min.x

    @property
    def height(self) -> float:
        return self.max.y - self.min.y

    @property
    def diagonal(self) -> float:
        return math.hypot(self.width, self.height)

    @property
    def area(self) -> float:
        return self.width * self.height

    @classmethod
    def of(cls, points) -> "Rect":
        arr = as_point_array(points)
        lo = arr.min(axis=0)
        hi = arr.max(axis=0)
        return cls(Point(float(lo[0]), float(lo[1])), Point(float(hi[0]), float(hi[1])))


# -- fitting ----------------------------------------------------------------


def _point_polyline_distance(points: np.ndarray, poly: np.ndarray) -> np.ndarray:
    """Min distance from each query point to a polyline (exact per-segment)."""
    a = poly[:-1]
    d = poly[1:] - a
    dd = np.einsum("ij,ij->i", d, d)
    dd[dd == 0] = 1.0
    out = np.empty(len(points))
    for i, p in enumerate(points):
        t = np.clip(np.einsum("ij,ij->i", p - a, d) / dd, 0.0, 1.0)
        proj = a + t[:, None] * d
        out[i] = np.sqrt(np.min(np.einsum("ij,ij->i", p - proj, p - proj)))
    return out


def _chord_params(pts: np.ndarray) -> np.ndarray:
    d = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    total = d.sum()
    if total == 0:
        raise InvalidInputError("all points coincide; cannot fit a curve")
    u = np.concatenate([[0.0], np.cumsum(d)]) / total
    return u


def _interp_segment(pts: np.ndarray, u: np.ndarray) -> SplineSegment:
    """Cubic interpolating spline through pts (inserting midpoints when < 4)."""
    keep = np.concatenate([[True], np.diff(u) > 1e-12])
    u, pts = u[keep], pts[keep]
    while len(pts) < 4:
        # split the widest gap with a chord midpoint
        i = int(np.argmax(np.diff(u)))
        mid_u = 0.5 * (u[i] + u[i + 1])
        mid_p = 0.5 * (pts[i] + pts[i + 1])
        u = np.insert(u, i + 1, mid_u)
        pts = np.insert(pts, i + 1, mid_p[None, :], axis=0)
    spl = make_interp_spline(u, pts, k=3)
    return SplineSegment.from_arrays(spl.c, spl.t)


def fit_spline(points, max_error: float) -> SplineSegment:
    """Least-squares cubic fit with knot refinement until the input points
    deviate from the curve by at most max_error."""
    pts = as_point_array(points)
    if len(pts) < 2:
        raise InvalidInputError("need at least 2 points to fit a spline")
    if max_error <= 0:
        raise InvalidInputError("max_error must be positive")
    if len(pts) == 2:
        if np.allclose(pts[0], pts[1]):
            raise InvalidInputError("cannot fit a spline through coincident points")
        return SplineSegment.line(pts[0], pts[1])

    u = _chord_params(pts)
    n_interior = 0
    while True:
        ncoef = n_interior + 4
        if ncoef > len(pts):
            break
        if n_interior == 0:
            interior = np.empty(0)
        else:
            qs = np.linspace(0.0, 1.0, n_interior + 2)[1:-1]
            interior = np.quantile(u, qs)
            if np.any(np.diff(interior) <= 0):
                break
        t = np.concatenate([[0.0] * 4, interior, [1.0] * 4])
        try:
            spl = make_lsq_spline(u, pts, t, k=3)
        except Exception:
            break
        seg = SplineSegment.from_arrays(spl.c, spl.t)
        dense = seg.sample(max(256, 16 * len(pts)))
        dev = _point_polyline_distance(pts, dense)
        if dev.max() <= max_error:
            return seg
        n_interior = max(1, n_interior * 2)
    # exact interpolation keeps input deviation at zero
    return _interp_segment(pts, u)


# -- differential quantities ------------------------------------------------


def arc_length(s: SplineSegment, rel_tol: float = 1e-5) -> float:
    """Arc length via chord summation with sample doubling."""
    prev = None
    n = 128
    while n <= 8192:
        pts = s.sample(n + 1)
        length = float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())
        if prev is not None and (length == 0 or abs(length - prev) <= rel_tol * max(length, 1e-300)):
            return length
        prev = length
        n *= 2
    return prev


def _speed_floor(s: SplineSegment) -> float:
    ctrl = as_point_array(s.control_points)
    diag = float(np.linalg.norm(ctrl.max(axis=0) - ctrl.min(axis=0)))
    return 1e-9 * max(diag, 1e-9)


def curvature_at(s: SplineSegment, t: float) -> float:
    """Signed curvature at normalized parameter t in [0, 1]."""
    if not 0.0 <= t <= 1.0:
        raise InvalidInputError("t must lie in [0, 1]")
    d1 = s.derivatives_at(t, 1)
    d2 = s.derivatives_at(t, 2)
    speed2 = float(d1[0] ** 2 + d1[1] ** 2)
    if speed2 <= _speed_floor(s) ** 2:
        raise CurvatureUndefinedError(f"vanishing velocity at t={t}")
    return float((d1[0] * d2[1] - d1[1] * d2[0]) / speed2**1.5)


def curvature_profile(s: SplineSegment, ts) -> np.ndarray:
    """Signed curvature at an array of parameters; NaN where undefined."""
    ts = np.asarray(ts, dtype=float)
    d1 = s.derivatives_at(ts, 1)
    d2 = s.derivatives_at(ts, 2)
    speed2 = d1[:, 0] ** 2 + d1[:, 1] ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        k = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed2**1.5
    k[speed2 <= _speed_floor(s) ** 2] = np.nan
    return k


def curvature_extrema(s: SplineSegment, samples: int = 128, prominence: float = 0.0) -> list[float]:
    """Parameters of prominent local extrema of signed curvature.

    Endpoints are excluded; `prominence` is an absolute curvature threshold.
    """
    if samples < 16:
        raise InvalidInputError("need at least 16 samples")
    if prominence < 0:
        raise InvalidInputError("prominence must be non-negative")
    ts = np.linspace(0.0, 1.0, samples)
    k = np.nan_to_num(curvature_profile(s, ts), nan=0.0)
    prom = max(prominence, 1e-12)
    hi, _ = signal.find_peaks(k, prominence=prom)
    lo, _ = signal.find_peaks(-k, prominence=prom)
    idx = sorted(set(hi.tolist()) | set(lo.tolist()))
    return [float(ts[i]) for i in idx]


# -- polyline / polygon operations ------------------------------------------


def polyline_length(poly: np.ndarray) -> float:
    poly = as_point_array(poly)
    return float(np.linalg.norm(np.diff(poly, axis=0), axis=1).sum())


def polygon_area(poly: np.ndarray) -> float:
    """Unsigned shoelace area of a closed (or implicitly closed) polygon."""
    p = as_point_array(poly)
    x, y = p[:, 0], p[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def angle_deg(vec) -> float:
    """CCW angle of a vector from +x, in [0, 360)."""
    a = math.degrees(math.atan2(vec[1], vec[0]))
    return a % 360.0


def convex_hull(points) -> list[Point]:
    """Monotone-chain hull, CCW, collinear interior points excluded."""
    arr = as_point_array(points)
    if len(arr) == 0:
        raise InvalidInputError("convex hull of empty point set")
    uniq = sorted({(float(x), float(y)) for x, y in arr})
    if len(uniq) == 1:
        return [Point(*uniq[0])]

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out

    lower = half(uniq)
    upper = half(reversed(uniq))
    hull = lower[:-1] + upper[:-1]
    if len(hull) < 2:  # all collinear
        return [Point(*uniq[0]), Point(*uniq[-1])]
    return [Point(x, y) for x, y in hull]


def _circle_from(*pts) -> Circle | None:
    if len(pts) == 2:
        (ax, ay), (bx, by) = pts
        cx, cy = (ax + bx) / 2.0, (ay + by) / 2.0
        r = max(math.hypot(ax - cx, ay - cy), math.hypot(bx - cx, by - cy))
        return Circle(Point(cx, cy), r)
    (ax, ay), (bx, by), (cx, cy) = pts
    ox, oy = (min(ax, bx, cx) + max(ax, bx, cx)) / 2.0, (min(ay, by, cy) + max(ay, by, cy)) / 2.0
    ax, ay, bx, by, cx, cy = ax - ox, ay - oy, bx - ox, by - oy, cx - ox, cy - oy
    d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0
    if d == 0:
        return None
    x = ox + ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    y = oy + ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    r = max(math.hypot(p[0] - x, p[1] - y) for p in pts)
    return Circle(Point(x, y), r)


def min_enclosing_circle(points) -> Circle:
    """Smallest enclosing circle, Welzl move-to-front (expected linear)."""
    arr = as_point_array(points)
    if len(arr) == 0:
        raise InvalidInputError("minimum enclosing circle of empty point set")
    if len(arr) > 32:
        # the circle is determined by hull vertices alone
        arr = np.array([(p.x, p.y) for p in convex_hull(arr)])
    pts = [(float(x), float(y)) for x, y in arr]
    if len(pts) == 1:
        return Circle(Point(*pts[0]), 0.0)
    rng = random.Random(0x5EED)
    shuffled = pts[:]
    rng.shuffle(shuffled)

    c: Circle | None = None
    for i, p in enumerate(shuffled):
        if c is not None and c.contains(p):
            continue
        # one known boundary point
        c = Circle(Point(*p), 0.0)
        for j, q in enumerate(shuffled[: i + 1]):
            if c.contains(q):
                continue
            if c.radius == 0.0:
                c = _circle_from(p, q)
                continue
            # two known boundary points
            c2 = _circle_from(p, q)
            left = right = None
            px, py = p
            qx, qy = q
            for r in shuffled[: j + 1]:
                if c2.contains(r):
                    continue
                cr = (qx - px) * (r[1] - py) - (qy - py) * (r[0] - px)
                circ = _circle_from(p, q, r)
                if circ is None:
                    continue
                ccx = (qx - px) * (circ.center.y - py) - (qy - py) * (circ.center.x - px)
                if cr > 0 and (left is None or ccx > (qx - px) * (left.center.y - py) - (qy - py) * (left.center.x - px)):
                    left = circ
                elif cr < 0 and (right is None or ccx < (qx - px) * (right.center.y - py) - (qy - py) * (right.center.x - px)):
                    right = circ
            if left is None and right is None:
                c = c2
            elif left is None:
                c = right
            elif right is None:
                c = left
            else:
                c = left if left.radius <= right.radius else right
    return c


def rdp_simplify(points, epsilon: float) -> np.ndarray:
    """Ramer-Douglas-Peucker simplification; endpoints always retained."""
    poly = as_point_array(points)
    if len(poly) < 2:
        raise InvalidInputError("need at least 2 points")
    if epsilon <= 0:
        raise InvalidInputError("epsilon must be positive")
    keep = np.zeros(len(poly), dtype=bool)
    keep[0] = keep[-1] = True
    stack = [(0, len(poly) - 1)]
    while stack:
        i, j = stack.pop()
        if j <= i + 1:
            continue
        a, b = poly[i], poly[j]
        ab = b - a
        denom = float(ab @ ab)
        rel = poly[i + 1 : j] - a
        if denom == 0:
            d = np.linalg.norm(rel, axis=1)
        else:
            d = np.abs(rel[:, 0] * ab[1] - rel[:, 1] * ab[0]) / math.sqrt(denom)
        k = int(np.argmax(d))
        if d[k] > epsilon:
            m = i + 1 + k
            keep[m] = True
            stack.append((i, m))
            stack.append((m, j))
    return poly[keep]


# -- crossings --------------------------------------------------------------


def _seg_intersection(p1, q1, p2, q2):
    """Intersection of two segments; returns (point, s, t) or None."""
    r = q1 - p1
    s = q2 - p2
    denom = r[0] * s[1] - r[1] * s[0]
    if abs(denom) < 1e-14 * (np.linalg.norm(r) * np.linalg.norm(s) + 1e-300):
        return None  # parallel or degenerate; overlaps are not transversal
    qp = p2 - p1
    u = (qp[0] * s[1] - qp[1] * s[0]) / denom
    v = (qp[0] * r[1] - qp[1] * r[0]) / denom
    if -1e-12 <= u <= 1 + 1e-12 and -1e-12 <= v <= 1 + 1e-12:
        return p1 + u * r, float(u), float(v)
    return None


def _passes_through(poly: np.ndarray, vi: int, other_a, other_b) -> bool:
    """True when the polyline truly crosses the other segment at vertex vi."""
    if vi <= 0 or vi >= len(poly) - 1:
        return False
    d = other_b - other_a
    s_prev = d[0] * (poly[vi - 1][1] - other_a[1]) - d[1] * (poly[vi - 1][0] - other_a[0])
    s_next = d[0] * (poly[vi + 1][1] - other_a[1]) - d[1] * (poly[vi + 1][0] - other_a[0])
    return s_prev * s_next < 0


def count_crossings(polylines: Sequence[np.ndarray]) -> int:
    """Count transversal crossing points among the polylines.

    Shared endpoints of consecutive segments and end-to-end junctions are not
    crossings; coincident crossing points count once.
    """
    polys = [as_point_array(p) for p in polylines]
    for p in polys:
        if len(p) < 2:
            raise InvalidInputError("each polyline needs at least 2 points")
    allpts = np.concatenate(polys)
    diag = float(np.linalg.norm(allpts.max(axis=0) - allpts.min(axis=0)))
    tol = 1e-9 + 1e-6 * diag

    seg_poly, seg_idx, seg_a, seg_b = [], [], [], []
    for pi, poly in enumerate(polys):
        for si in range(len(poly) - 1):
            seg_poly.append(pi)
            seg_idx.append(si)
            seg_a.append(poly[si])
            seg_b.append(poly[si + 1])
    pid = np.asarray(seg_poly)
    sid = np.asarray(seg_idx)
    A = np.asarray(seg_a)
    B = np.asarray(seg_b)

    # vectorized candidate pass: all index pairs a < b, skipping identical or
    # consecutive segments of the same polyline
    ia, ib = np.triu_indices(len(A), k=1)
    keep = ~((pid[ia] == pid[ib]) & (np.abs(sid[ia] - sid[ib]) <= 1))
    ia, ib = ia[keep], ib[keep]
    # cheap bounding-box rejection before the intersection arithmetic
    lo = np.minimum(A, B)
    hi = np.maximum(A, B)
    overlap = np.all(lo[ia] <= hi[ib] + tol, axis=1) & np.all(lo[ib] <= hi[ia] + tol, axis=1)
    ia, ib = ia[overlap], ib[overlap]
    r = B[ia] - A[ia]
    s = B[ib] - A[ib]
    qp = A[ib] - A[ia]
    denom = r[:, 0] * s[:, 1] - r[:, 1] * s[:, 0]
    rn = np.linalg.norm(r, axis=1)
    sn = np.linalg.norm(s, axis=1)
    nonparallel = np.abs(denom) >= 1e-14 * (rn * sn + 1e-300)
    safe = np.where(nonparallel, denom, 1.0)
    u_all = (qp[:, 0] * s[:, 1] - qp[:, 1] * s[:, 0]) / safe
    v_all = (qp[:, 0] * r[:, 1] - qp[:, 1] * r[:, 0]) / safe
    inside = (
        nonparallel
        & (u_all >= -1e-12)
        & (u_all <= 1 + 1e-12)
        & (v_all >= -1e-12)
        & (v_all <= 1 + 1e-12)
    )

    found: list[np.ndarray] = []
    for k in np.nonzero(inside)[0]:
        a, b = int(ia[k]), int(ib[k])
        pa, sa, p1, q1 = pid[a], sid[a], A[a], B[a]
        pb, sb, p2, q2 = pid[b], sid[b], A[b], B[b]
        u, v = float(u_all[k]), float(v_all[k])
        pt = p1 + u * (q1 - p1)
        len1 = rn[k]
        len2 = sn[k]
        near_end_1 = u * len1 < tol or (1 - u) * len1 < tol
        near_end_2 = v * len2 < tol or (1 - v) * len2 < tol
        if near_end_1 and near_end_2:
            vi1 = sa if u * len1 < tol else sa + 1
            vi2 = sb if v * len2 < tol else sb + 1
            # vertex-to-vertex: a crossing only when both paths pass through
            if not (
                _passes_through(polys[pa], vi1, p2, q2)
                and _passes_through(polys[pb], vi2, p1, q1)
            ):
                continue
        elif near_end_1:
            vi = sa if u * len1 < tol else sa + 1
            if not _passes_through(polys[pa], vi, p2, q2):
                continue
        elif near_end_2:
            vi = sb if v * len2 < tol else sb + 1
            if not _passes_through(polys[pb], vi, p1, q1):
                continue
        if any(np.linalg.norm(pt - f) <= tol for f in found):
            continue
        found.append(pt)
    return len(found)
