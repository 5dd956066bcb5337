"""Segmentation of trajectories into primitive strokes at landmark points.

The trajectory is densely sampled per pen stroke; landmark locations (curvature
extrema, sharp junctions, pen events) are matched back onto the sampled path and
the path is cut at every matching interior position. A location traversed twice
(a retrace) therefore cuts twice while counting once as a landmark.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidInputError
from .geometry import Point, angle_deg, curvature_extrema, curvature_profile
from .glyph_model import (
    DIRECTION_CODES,
    Glyph,
    LandmarkPoint,
    PrimitiveStroke,
    Trajectory,
    coincidence_tol,
    glyph_points,
)

__all__ = [
    "SegmentationConfig",
    "SegmentationResult",
    "detect_landmarks",
    "segment_strokes",
    "segment",
    "override_landmarks",
    "apply_landmark_edits",
    "quantize_direction",
    "quantize_angle",
    "classify_updown",
    "updown_of_angle",
    "detect_retraces",
]

_CODE_BY_SECTOR = ("E", "NE", "N", "NW", "W", "SW", "S", "SE")
_KIND_PRIORITY = {"pen_event": 0, "sharp_junction": 1, "curvature_extremum": 2}


@dataclass(frozen=True)
class SegmentationConfig:
    curvature_samples: int = 128
    curvature_prominence: Optional[float] = None  # None: 0.05 x max |k| of glyph
    sharp_junction_threshold_deg: float = 60.0
    retrace_hausdorff_tol: float = 0.03  # fraction of bbox diagonal

    def __post_init__(self):
        if not 0 < self.sharp_junction_threshold_deg < 180:
            raise InvalidInputError("sharp junction threshold must be in (0, 180)")
        if self.retrace_hausdorff_tol <= 0:
            raise InvalidInputError("retrace tolerance must be positive")
        if self.curvature_samples < 16:
            raise InvalidInputError("need at least 16 curvature samples")


@dataclass(frozen=True)
class SegmentationResult:
    glyph: Glyph
    trajectory: Trajectory
    config: SegmentationConfig
    landmarks: tuple[LandmarkPoint, ...]
    strokes: tuple[PrimitiveStroke, ...]
    stroke_inventory_key: tuple[str, ...]
    disjointed_strokes: tuple[PrimitiveStroke, ...]
    retrace_pairs: tuple[tuple[int, int], ...]
    pen_stroke_paths: tuple[np.ndarray, ...]

    @property
    def visible_strokes(self) -> tuple[PrimitiveStroke, ...]:
        return tuple(s for s in self.strokes if s.visible)

    @property
    def pen_drags(self) -> tuple[PrimitiveStroke, ...]:
        return tuple(s for s in self.strokes if not s.visible)


# -- direction coding -------------------------------------------------------


def quantize_angle(angle: float) -> str:
    """Bin an angle into the 8 compass codes; boundaries round CCW."""
    sector = int(math.floor(((angle + 22.5) % 360.0) / 45.0)) % 8
    return _CODE_BY_SECTOR[sector]


def quantize_direction(s: PrimitiveStroke) -> str:
    if s.length <= 0:
        raise InvalidInputError("cannot quantize a zero-length stroke")
    return quantize_angle(s.net_angle)


def updown_of_angle(angle: float) -> str:
    """Down-strokes point within [210, 330] degrees, inclusive."""
    a = angle % 360.0
    return "down" if 210.0 <= a <= 330.0 else "up"


def classify_updown(s: PrimitiveStroke) -> str:
    if s.length <= 0:
        raise InvalidInputError("cannot classify a zero-length stroke")
    return updown_of_angle(s.net_angle)


# -- trajectory sampling ----------------------------------------------------


def _sample_pen_stroke(g: Glyph, stroke, n: int) -> tuple[np.ndarray, list[int]]:
    """Sample one pen stroke; returns (points, pass-boundary sample indices)."""
    pts_all: list[np.ndarray] = []
    boundaries: list[int] = []
    count = 0
    for i, p in enumerate(stroke.passes):
        seg = g.segments[p.segment_index]
        ts = np.linspace(0.0, 1.0, n)
        if p.reversed:
            ts = ts[::-1]
        pts = seg.point_at(ts)
        if i > 0:
            boundaries.append(count - 1)
            pts = pts[1:]
        pts_all.append(pts)
        count += len(pts)
    points = np.concatenate(pts_all)
    # drop exact consecutive duplicates so chords have positive length
    keep = np.concatenate([[True], np.linalg.norm(np.diff(points, axis=0), axis=1) > 0])
    if not keep.all():
        old_idx = np.flatnonzero(keep)
        remap = np.cumsum(keep) - 1
        boundaries = sorted({int(remap[b]) for b in boundaries})
        points = points[keep]
    return points, list(boundaries)


def _glyph_prominence(g: Glyph, cfg: SegmentationConfig) -> float:
    if cfg.curvature_prominence is not None:
        return cfg.curvature_prominence
    ts = np.linspace(0.0, 1.0, cfg.curvature_samples)
    peak = 0.0
    for seg in g.segments:
        k = np.abs(curvature_profile(seg, ts))
        if np.any(np.isfinite(k)):
            peak = max(peak, float(np.nanmax(k)))
    return 0.05 * peak


# -- landmark detection -----------------------------------------------------


def detect_landmarks(g: Glyph, t: Trajectory, cfg: SegmentationConfig = SegmentationConfig()) -> list[LandmarkPoint]:
    """Curvature extrema, sharp junctions and pen events, deduplicated."""
    tol = coincidence_tol(g)
    prominence = _glyph_prominence(g, cfg)
    raw: list[LandmarkPoint] = []

    # curvature extrema, once per glyph segment
    for seg in g.segments:
        for te in curvature_extrema(seg, samples=cfg.curvature_samples, prominence=prominence):
            x, y = seg.point_at(te)
            raw.append(LandmarkPoint(Point(float(x), float(y)), "curvature_extremum"))

    # sharp junctions at pass boundaries within each pen stroke
    for stroke in t.pen_strokes:
        points, boundaries = _sample_pen_stroke(g, stroke, cfg.curvature_samples)
        for b in boundaries:
            if b <= 0 or b >= len(points) - 1:
                continue
            v_in = points[b] - points[b - 1]
            v_out = points[b + 1] - points[b]
            turn = _turn_angle_deg(v_in, v_out)
            if turn > cfg.sharp_junction_threshold_deg:
                raw.append(LandmarkPoint(Point(*map(float, points[b])), "sharp_junction"))

    # pen events between consecutive pen strokes
    for i in range(len(t.pen_strokes) - 1):
        up = t.pen_strokes[i].end(g)
        down = t.pen_strokes[i + 1].start(g)
        raw.append(LandmarkPoint(Point(*map(float, up)), "pen_event"))
        raw.append(LandmarkPoint(Point(*map(float, down)), "pen_event"))

    return _dedupe_landmarks(raw, tol)


def _turn_angle_deg(v_in: np.ndarray, v_out: np.ndarray) -> float:
    n1 = np.linalg.norm(v_in)
    n2 = np.linalg.norm(v_out)
    if n1 == 0 or n2 == 0:
        return 0.0
    c = float(np.clip(np.dot(v_in, v_out) / (n1 * n2), -1.0, 1.0))
    return math.degrees(math.acos(c))


def _dedupe_landmarks(raw: Sequence[LandmarkPoint], tol: float) -> list[LandmarkPoint]:
    """Merge landmarks within tolerance, keeping the highest-priority kind."""
    kept: list[LandmarkPoint] = []
    for lm in sorted(raw, key=lambda l: _KIND_PRIORITY[l.kind]):
        dup = None
        for i, other in enumerate(kept):
            if math.hypot(lm.location.x - other.location.x, lm.location.y - other.location.y) <= tol:
                dup = i
                break
        if dup is None:
            kept.append(lm)
        elif lm.source == "manual" and kept[dup].source != "manual":
            kept[dup] = replace(kept[dup], source="manual")
    return kept


# -- cutting ----------------------------------------------------------------


def _match_cut_indices(path: np.ndarray, location: Point, snap_radius: float) -> list[int]:
    """Interior sample indices where the path passes through the location.

    Each contiguous near-pass yields one cut, so a retraced location cuts the
    path once per pass.
    """
    d = np.linalg.norm(path - np.array([location.x, location.y]), axis=1)
    near = d <= snap_radius
    cuts = []
    i = 0
    n = len(path)
    while i < n:
        if near[i]:
            j = i
            while j + 1 < n and near[j + 1]:
                j += 1
            k = i + int(np.argmin(d[i : j + 1]))
            if 0 < k < n - 1:
                cuts.append(k)
            i = j + 1
        else:
            i += 1
    return cuts


def _snap_radius(path: np.ndarray, tol: float) -> float:
    chords = np.linalg.norm(np.diff(path, axis=0), axis=1)
    return max(tol, 1.5 * float(chords.max()) if len(chords) else tol)


def _make_stroke(points: np.ndarray, visible: bool, index: int, pen_stroke_index: int) -> PrimitiveStroke:
    length = float(np.linalg.norm(np.diff(points, axis=0), axis=1).sum())
    net = points[-1] - points[0]
    if np.linalg.norm(net) > 1e-12:
        ang = angle_deg(net)
    else:
        # closed piece: fall back to the first-half displacement direction
        half = points[len(points) // 2] - points[0]
        ang = angle_deg(half) if np.linalg.norm(half) > 1e-12 else 0.0
    return PrimitiveStroke(
        points=points,
        visible=visible,
        net_angle=ang,
        length=length,
        direction_code=quantize_angle(ang),
        updown=updown_of_angle(ang),
        index=index,
        pen_stroke_index=pen_stroke_index,
    )


def segment_strokes(
    g: Glyph,
    t: Trajectory,
    landmarks: Sequence[LandmarkPoint],
    cfg: SegmentationConfig = SegmentationConfig(),
) -> SegmentationResult:
    """Cut the trajectory at every landmark position into primitive strokes.

    Pen-drags become invisible straight strokes between consecutive pen strokes;
    disjointed (composite) strokes are delimited at sharp junctions and pen
    events only.
    """
    tol = coincidence_tol(g)
    paths = [_sample_pen_stroke(g, stroke, cfg.curvature_samples)[0] for stroke in t.pen_strokes]

    strokes: list[PrimitiveStroke] = []
    disjointed: list[PrimitiveStroke] = []
    index = 0
    d_index = 0
    for si, path in enumerate(paths):
        snap = _snap_radius(path, tol)
        cuts_all: set[int] = set()
        cuts_sharp: set[int] = set()
        for lm in landmarks:
            if lm.kind == "pen_event":
                continue
            idxs = _match_cut_indices(path, lm.location, snap)
            cuts_all.update(idxs)
            if lm.kind == "sharp_junction":
                cuts_sharp.update(idxs)
        if si > 0:
            drag = np.array([paths[si - 1][-1], path[0]])
            strokes.append(_make_stroke(drag, visible=False, index=index, pen_stroke_index=si))
            index += 1
        for a, b in _pieces(len(path), cuts_all):
            strokes.append(_make_stroke(path[a : b + 1], visible=True, index=index, pen_stroke_index=si))
            index += 1
        for a, b in _pieces(len(path), cuts_sharp):
            disjointed.append(_make_stroke(path[a : b + 1], visible=True, index=d_index, pen_stroke_index=si))
            d_index += 1

    diag = float(np.linalg.norm(np.ptp(glyph_points(g), axis=0)))
    retrace_pairs = detect_retraces(disjointed, cfg.retrace_hausdorff_tol, diag)

    return SegmentationResult(
        glyph=g,
        trajectory=t,
        config=cfg,
        landmarks=tuple(landmarks),
        strokes=tuple(strokes),
        stroke_inventory_key=tuple(s.direction_code for s in strokes),
        disjointed_strokes=tuple(disjointed),
        retrace_pairs=tuple(retrace_pairs),
        pen_stroke_paths=tuple(paths),
    )


def _pieces(n: int, cuts: set[int]) -> list[tuple[int, int]]:
    edges = [0] + sorted(c for c in cuts if 0 < c < n - 1) + [n - 1]
    return [(a, b) for a, b in zip(edges, edges[1:]) if b > a]


def segment(g: Glyph, t: Trajectory, cfg: SegmentationConfig = SegmentationConfig()) -> SegmentationResult:
    """Detect landmarks, then cut the trajectory into primitive strokes."""
    return segment_strokes(g, t, detect_landmarks(g, t, cfg), cfg)


def override_landmarks(
    result: SegmentationResult,
    add: Sequence = (),
    remove: Sequence[int] = (),
) -> SegmentationResult:
    """Apply manual landmark edits and re-segment."""
    g, t, cfg = result.glyph, result.trajectory, result.config
    for i in remove:
        if not 0 <= i < len(result.landmarks):
            raise InvalidInputError(f"landmark index {i} out of range")
    kept = [lm for i, lm in enumerate(result.landmarks) if i not in set(remove)]

    tol = coincidence_tol(g)
    paths = result.pen_stroke_paths
    for p in add:
        loc = p if isinstance(p, Point) else Point(float(p[0]), float(p[1]))
        on_path = any(
            _min_polyline_distance(path, loc) <= max(tol, 0.002 * _diag(paths))
            for path in paths
        )
        if not on_path:
            raise InvalidInputError(f"added landmark ({loc.x}, {loc.y}) does not lie on the trajectory")
        kept.append(LandmarkPoint(loc, "sharp_junction", source="manual"))

    return segment_strokes(g, t, _dedupe_landmarks(kept, tol), cfg)


def apply_landmark_edits(result: SegmentationResult, edits: Sequence) -> SegmentationResult:
    """Replay a persisted landmark edit list onto a fresh segmentation.

    Edits with source "manual" are added; edits with source "suppressed"
    remove the nearest automatic landmark (matched by location).
    """
    adds = [e.location for e in edits if e.source == "manual"]
    removals = []
    tol = max(coincidence_tol(result.glyph), 0.002 * _diag(result.pen_stroke_paths))
    for e in edits:
        if e.source != "suppressed":
            continue
        best, best_d = None, tol
        for i, lm in enumerate(result.landmarks):
            d = math.hypot(lm.location.x - e.location.x, lm.location.y - e.location.y)
            if d <= best_d:
                best, best_d = i, d
        if best is not None:
            removals.append(best)
    if not adds and not removals:
        return result
    return override_landmarks(result, add=adds, remove=removals)


def _diag(paths: Sequence[np.ndarray]) -> float:
    allp = np.concatenate(paths)
    return float(np.linalg.norm(allp.max(axis=0) - allp.min(axis=0)))


def _min_polyline_distance(poly: np.ndarray, p: Point) -> float:
    a = poly[:-1]
    d = poly[1:] - a
    dd = np.einsum("ij,ij->i", d, d)
    dd[dd == 0] = 1.0
    q = np.array([p.x, p.y])
    t = np.clip(np.einsum("ij,ij->i", q - a, d) / dd, 0.0, 1.0)
    proj = a + t[:, None] * d
    return float(np.sqrt(np.min(np.einsum("ij,ij->i", q - proj, q - proj))))


# -- retraces ---------------------------------------------------------------


def detect_retraces(
    strokes: Sequence[PrimitiveStroke],
    hausdorff_tol: float = 0.03,
    bbox_diag: Optional[float] = None,
) -> list[tuple[int, int]]:
    """Pairs (i, i+1) of consecutive visible strokes tracing the same path in
    opposite directions (symmetric Hausdorff within tolerance)."""
    visible = [(i, s) for i, s in enumerate(strokes) if s.visible]
    if bbox_diag is None and visible:
        allp = np.concatenate([s.points for _, s in visible])
        bbox_diag = float(np.linalg.norm(allp.max(axis=0) - allp.min(axis=0)))
    limit = hausdorff_tol * (bbox_diag or 1.0)
    pairs = []
    for (i, a), (j, b) in zip(visible, visible[1:]):
        if j != i + 1:
            continue
        net_a = a.points[-1] - a.points[0]
        net_b = b.points[-1] - b.points[0]
        if float(np.dot(net_a, net_b)) >= 0:
            continue
        if _hausdorff(a.points, b.points) <= limit:
            pairs.append((i, j))
    return pairs


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    d = np.linalg.norm(a[:, None, :] - b[None, :, :], axis=2)
    return max(float(d.min(axis=1).max()), float(d.min(axis=0).max()))
