"""Character data model: glyphs, trajectories, primitive strokes, corpora."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import DegenerateGlyphError, InvalidInputError
from .geometry import Point, Rect, SplineSegment, as_point_array

__all__ = [
    "Glyph",
    "DirectedPass",
    "PenStroke",
    "Trajectory",
    "PrimitiveStroke",
    "LandmarkPoint",
    "ScriptCorpus",
    "validate",
    "validate_trajectory",
    "normalize",
    "to_polyline",
    "glyph_bbox",
    "coincidence_tol",
    "transform_glyph",
]

DIRECTION_CODES = ("N", "NE", "E", "SE", "S", "SW", "W", "NW")


@dataclass(frozen=True)
class Glyph:
    id: str
    script_id: str
    segments: tuple[SplineSegment, ...]
    baseline_y: Optional[float] = None
    label: Optional[str] = None
    usage_frequency: Optional[float] = None


@dataclass(frozen=True)
class DirectedPass:
    """One directed traversal of a glyph segment within a pen stroke."""

    segment_index: int
    reversed: bool = False
    retrace: bool = False


@dataclass(frozen=True)
class PenStroke:
    """A pen-down-to-pen-up movement: connected directed segment passes."""

    passes: tuple[DirectedPass, ...]

    def start(self, glyph: Glyph) -> np.ndarray:
        return _pass_endpoint(glyph, self.passes[0], end=False)

    def end(self, glyph: Glyph) -> np.ndarray:
        return _pass_endpoint(glyph, self.passes[-1], end=True)


@dataclass(frozen=True)
class Trajectory:
    glyph_id: str
    pen_strokes: tuple[PenStroke, ...]
    provenance: str = "reconstructed"  # reconstructed | recorded | manual


@dataclass(frozen=True)
class PrimitiveStroke:
    """One ballistic stroke between landmark points (or an invisible pen-drag)."""

    points: np.ndarray  # sampled path, shape (n, 2)
    visible: bool
    net_angle: float  # degrees in [0, 360)
    length: float
    direction_code: str  # one of DIRECTION_CODES
    updown: str  # "up" | "down"
    index: int  # position in writing order
    pen_stroke_index: int = 0

    @property
    def start(self) -> np.ndarray:
        return self.points[0]

    @property
    def end(self) -> np.ndarray:
        return self.points[-1]


@dataclass(frozen=True)
class LandmarkPoint:
    location: Point
    kind: str  # curvature_extremum | sharp_junction | pen_event
    source: str = "auto"  # auto | manual


@dataclass(frozen=True)
class ScriptCorpus:
    id: str
    name: str
    glyphs: tuple[Glyph, ...]
    baseline_y: Optional[float] = None

    def glyph(self, glyph_id: str) -> Glyph:
        for g in self.glyphs:
            if g.id == glyph_id:
                return g
        raise KeyError(glyph_id)


def _pass_endpoint(glyph: Glyph, p: DirectedPass, end: bool) -> np.ndarray:
    seg = glyph.segments[p.segment_index]
    t = 1.0 if (end != p.reversed) else 0.0
    return seg.point_at(t)


# -- validation -------------------------------------------------------------


def validate(g: Glyph) -> list[str]:
    """Report Glyph invariant violations; an empty list means valid."""
    problems = []
    if not g.id:
        problems.append("glyph id is empty")
    if len(g.segments) == 0:
        problems.append("glyph has no segments")
    for i, seg in enumerate(g.segments):
        ctrl = np.array([(p.x, p.y) for p in seg.control_points])
        if not np.all(np.isfinite(ctrl)):
            problems.append(f"segment {i} has non-finite control points")
    if g.usage_frequency is not None and g.usage_frequency < 0:
        problems.append("usage_frequency must be non-negative")
    if g.baseline_y is not None and not math.isfinite(g.baseline_y):
        problems.append("baseline_y must be finite")
    return problems


def validate_trajectory(g: Glyph, t: Trajectory) -> list[str]:
    """Check trajectory coverage and per-stroke connectivity."""
    problems = []
    if len(t.pen_strokes) == 0:
        problems.append("trajectory has no pen strokes")
        return problems
    tol = coincidence_tol(g)
    covered: dict[int, int] = {}
    for si, stroke in enumerate(t.pen_strokes):
        if len(stroke.passes) == 0:
            problems.append(f"pen stroke {si} has no passes")
            continue
        prev_end = None
        prev_pass = None
        for p in stroke.passes:
            if not 0 <= p.segment_index < len(g.segments):
                problems.append(f"pass references unknown segment {p.segment_index}")
                continue
            if p.retrace:
                if prev_pass is None or prev_pass.segment_index != p.segment_index or prev_pass.reversed == p.reversed:
                    problems.append(
                        f"retrace of segment {p.segment_index} must immediately follow its opposite pass"
                    )
            else:
                covered[p.segment_index] = covered.get(p.segment_index, 0) + 1
            start = _pass_endpoint(g, p, end=False)
            if prev_end is not None and np.linalg.norm(start - prev_end) > tol:
                problems.append(
                    f"pen stroke {si}: pass of segment {p.segment_index} does not connect to previous pass"
                )
            prev_end = _pass_endpoint(g, p, end=True)
            prev_pass = p
    for i in range(len(g.segments)):
        n = covered.get(i, 0)
        if n != 1:
            problems.append(f"segment {i} covered {n} times (expected exactly once)")
    return problems


# -- geometry over glyphs ---------------------------------------------------

_BBOX_SAMPLES = 64


def glyph_points(g: Glyph, samples_per_segment: int = _BBOX_SAMPLES) -> np.ndarray:
    return np.concatenate([seg.sample(samples_per_segment) for seg in g.segments])


def glyph_bbox(g: Glyph) -> Rect:
    return Rect.of(glyph_points(g))


def coincidence_tol(g: Glyph) -> float:
    """Point-coincidence tolerance: 1e-6 of the bounding-box diagonal."""
    diag = glyph_bbox(g).diagonal
    return 1e-9 + 1e-6 * diag


def to_polyline(g: Glyph, samples_per_segment: int) -> list[np.ndarray]:
    """Per-segment uniform-parameter samples, in segment-storage order."""
    if samples_per_segment < 2:
        raise InvalidInputError("samples_per_segment must be at least 2")
    return [seg.sample(samples_per_segment) for seg in g.segments]


def transform_glyph(
    g: Glyph,
    scale: float = 1.0,
    rotate_deg: float = 0.0,
    translate: tuple[float, float] = (0.0, 0.0),
) -> Glyph:
    """Uniform scale, then rotation about the origin, then translation."""
    th = math.radians(rotate_deg)
    rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    tx, ty = translate

    def xform(ctrl: np.ndarray) -> np.ndarray:
        return (ctrl * scale) @ rot.T + np.array([tx, ty])

    segs = tuple(
        SplineSegment.from_arrays(xform(as_point_array(s.control_points)), s.knots)
        for s in g.segments
    )
    baseline = g.baseline_y
    if baseline is not None and rotate_deg == 0.0:
        baseline = baseline * scale + ty
    elif baseline is not None:
        baseline = None  # a rotated horizontal baseline is no longer horizontal
    return replace(g, segments=segs, baseline_y=baseline)


def normalize(g: Glyph, mode: str = "unit_diagonal") -> Glyph:
    """Translate the bbox min corner to the origin and scale the diagonal to 1."""
    if mode == "none":
        return g
    if mode != "unit_diagonal":
        raise InvalidInputError(f"unknown normalization mode {mode!r}")
    bbox = glyph_bbox(g)
    diag = bbox.diagonal
    if diag <= 0:
        raise DegenerateGlyphError(f"glyph {g.id!r} has a zero-diagonal bounding box")
    s = 1.0 / diag
    return transform_glyph(g, scale=s, translate=(-bbox.min.x * s, -bbox.min.y * s))
