"""Per-character metrics: visual, dynamic and cognitive measures.

All operations consume a glyph plus its segmented trajectory. Metrics whose
prerequisites are missing surface as None with an entry in
MetricRecord.reasons rather than a silent zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DegenerateGlyphError, InvalidInputError, MetricUnavailableError, MetricUndefinedError
from .geometry import (
    convex_hull,
    count_crossings,
    curvature_profile,
    min_enclosing_circle,
    polygon_area,
    rdp_simplify,
)
from .glyph_model import Glyph, Trajectory, coincidence_tol, glyph_bbox, normalize
from .segmentation import SegmentationResult, _sample_pen_stroke, _turn_angle_deg

__all__ = [
    "StrokeCounts",
    "AngleMetrics",
    "MetricRecord",
    "length",
    "divergence",
    "size",
    "lb_index",
    "avg_curvature",
    "compactness",
    "openness",
    "distinctivity",
    "dtw",
    "resample_uniform",
    "ascendancy_descendance",
    "circularity",
    "rectangularity",
    "complexity_factors",
    "stroke_counts",
    "stroke_length_stats",
    "changeability",
    "disfluency",
    "entropy",
    "entropy_of_codes",
    "angle_metrics",
    "pen_drag_distance",
    "cognitive_counts",
    "compute_all",
    "record_to_dict",
    "SCALAR_FIELDS",
]


@dataclass(frozen=True)
class StrokeCounts:
    primitive: int
    pen_strokes: int
    disjointed: int
    retraces: int
    upstrokes: int
    downstrokes: int


@dataclass(frozen=True)
class AngleMetrics:
    major_angle_deg: float
    initial_angle_deg: float
    divergence_angle_deg: Optional[float]
    pen_drag_angles_deg: tuple[float, ...]
    inter_stroke_histogram: tuple[int, ...]  # 8 bins, sectors centered at k*45 deg


@dataclass(frozen=True)
class MetricRecord:
    glyph_id: str
    length: float
    divergence: float
    size: float
    lb_index: Optional[float]
    avg_curvature: float
    compactness: Optional[float]
    openness: Optional[float]
    ascendancy_pct: Optional[float]
    descendance_pct: Optional[float]
    circularity: Optional[float]
    rectangularity: Optional[float]
    inter_stroke_angle_sum_deg: float
    crossings: int
    counts: StrokeCounts
    avg_stroke_length: float
    stroke_length_list: tuple[float, ...]
    changeability: Optional[float]
    disfluency: int
    disjoint_count: int
    entropy_nats: float
    pen_drag_distance: float
    landmark_count: int
    rdp_point_count: int
    angles: AngleMetrics
    reasons: dict = field(default_factory=dict)


# -- visual metrics ---------------------------------------------------------


def length(res: SegmentationResult) -> float:
    """Total pen movement: visible ink plus straight-line pen-drags."""
    return float(sum(s.length for s in res.strokes))


def divergence(g: Glyph, t: Trajectory) -> float:
    a = t.pen_strokes[0].start(g)
    b = t.pen_strokes[-1].end(g)
    return float(np.linalg.norm(b - a))


def size(g: Glyph) -> float:
    return glyph_bbox(g).area


def lb_index(g: Glyph) -> float:
    bbox = glyph_bbox(g)
    if bbox.width <= 0:
        raise MetricUndefinedError("zero-width glyph has no length-breadth index")
    return bbox.height / bbox.width


def avg_curvature(res: SegmentationResult, samples_per_segment: int = 128) -> float:
    """Arc-length-weighted mean of |curvature| over the visible ink."""
    ts = np.linspace(0.0, 1.0, samples_per_segment)
    num = 0.0
    den = 0.0
    for seg in res.glyph.segments:
        k = np.abs(curvature_profile(seg, ts))
        pts = seg.point_at(ts)
        ds = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        w = np.concatenate([[ds[0] / 2], (ds[:-1] + ds[1:]) / 2, [ds[-1] / 2]])
        ok = np.isfinite(k)
        num += float((k[ok] * w[ok]).sum())
        den += float(w[ok].sum())
    return num / den if den > 0 else 0.0


def compactness(total_length: float, bbox_area: float) -> float:
    if bbox_area <= 0:
        raise MetricUndefinedError("compactness undefined for a zero-area bounding box")
    return total_length / bbox_area


def openness(div: float, total_length: float) -> float:
    if total_length <= 0:
        raise MetricUndefinedError("openness undefined for a zero-length character")
    return div / total_length


def ascendancy_descendance(res: SegmentationResult, baseline_y: Optional[float]) -> tuple[float, float]:
    """Percentages of visible arc length above / below the baseline."""
    if baseline_y is None:
        raise MetricUnavailableError("no baseline defined")
    above = below = 0.0
    for s in res.visible_strokes:
        p = s.points
        for (x0, y0), (x1, y1) in zip(p[:-1], p[1:]):
            seg_len = math.hypot(x1 - x0, y1 - y0)
            if seg_len == 0:
                continue
            a, b = y0 - baseline_y, y1 - baseline_y
            if a == 0 and b == 0:
                above += seg_len / 2
                below += seg_len / 2
            elif a >= 0 and b >= 0:
                above += seg_len
            elif a <= 0 and b <= 0:
                below += seg_len
            else:
                f = abs(a) / (abs(a) + abs(b))
                if a > 0:
                    above += seg_len * f
                    below += seg_len * (1 - f)
                else:
                    below += seg_len * f
                    above += seg_len * (1 - f)
    total = above + below
    if total == 0:
        raise MetricUndefinedError("no visible ink")
    return 100.0 * above / total, 100.0 * below / total


def _hull_area(g: Glyph) -> float:
    pts = np.concatenate([seg.sample(64) for seg in g.segments])
    hull = convex_hull(pts)
    if len(hull) < 3:
        raise MetricUndefinedError("degenerate (zero-area) convex hull")
    return polygon_area(np.array([(p.x, p.y) for p in hull]))


def circularity(g: Glyph) -> float:
    area = _hull_area(g)
    pts = np.concatenate([seg.sample(64) for seg in g.segments])
    circ = min_enclosing_circle(pts)
    return area / (math.pi * circ.radius**2)


def rectangularity(g: Glyph) -> float:
    area = _hull_area(g)
    box = glyph_bbox(g).area
    if box <= 0:
        raise MetricUndefinedError("zero-area bounding box")
    return area / box


def complexity_factors(res: SegmentationResult) -> tuple[float, int]:
    """(sum of inter-stroke turn angles in degrees, number of crossings)."""
    visible = res.visible_strokes
    angle_sum = 0.0
    for a, b in zip(visible, visible[1:]):
        angle_sum += _turn_angle_deg(a.end - a.start, b.end - b.start)
    if visible:
        # drop collinear sample points first; the crossing count is a
        # topological property and pair enumeration is quadratic
        allpts = np.concatenate([s.points for s in visible])
        diag = float(np.linalg.norm(allpts.max(axis=0) - allpts.min(axis=0)))
        eps = 1e-9 + 1e-4 * diag
        paths = [
            rdp_simplify(s.points, eps) if len(s.points) > 2 else s.points
            for s in visible
        ]
        crossings = count_crossings(paths)
    else:
        crossings = 0
    return angle_sum, crossings


# -- distinctivity (DTW) ----------------------------------------------------


def resample_uniform(points: np.ndarray, n: int) -> np.ndarray:
    """Resample a polyline to n points uniform in arc length."""
    pts = np.asarray(points, dtype=float)
    d = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(d)])
    if s[-1] == 0:
        return np.repeat(pts[:1], n, axis=0)
    target = np.linspace(0.0, s[-1], n)
    return np.stack([np.interp(target, s, pts[:, 0]), np.interp(target, s, pts[:, 1])], axis=1)


def dtw(a: np.ndarray, b: np.ndarray) -> tuple[float, list[tuple[int, int]]]:
    """Dynamic time warping with steps (1,1), (1,0), (0,1).

    Returns the raw accumulated cost and the optimal warping path.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float).T).T
    b = np.atleast_2d(np.asarray(b, dtype=float).T).T
    cost = cdist(a, b)
    n, m = cost.shape
    acc = np.full((n + 1, m + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, n + 1):
        row = acc[i]
        prev = acc[i - 1]
        ci = cost[i - 1]
        for j in range(1, m + 1):
            row[j] = ci[j - 1] + min(prev[j - 1], prev[j], row[j - 1])
    # backtrack
    path = []
    i, j = n, m
    while i > 0 or j > 0:
        path.append((i - 1, j - 1))
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            k = int(np.argmin([acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1]]))
            if k == 0:
                i -= 1
                j -= 1
            elif k == 1:
                i -= 1
            else:
                j -= 1
    path.reverse()
    return float(acc[n, m]), path


def _shape_sequence(g: Glyph, t: Optional[Trajectory], mode: str, resample: int) -> np.ndarray:
    gn = normalize(g, "unit_diagonal")
    if mode == "trajectory":
        if t is None:
            raise InvalidInputError("trajectory mode requires a trajectory")
        paths = [_sample_pen_stroke(gn, stroke, 64)[0] for stroke in t.pen_strokes]
        pts = np.concatenate(paths)
    elif mode == "static":
        pts = np.concatenate([seg.sample(64) for seg in gn.segments])
    else:
        raise InvalidInputError(f"unknown distinctivity mode {mode!r}")
    return resample_uniform(pts, resample)


def distinctivity(
    a: tuple[Glyph, Optional[Trajectory]],
    b: tuple[Glyph, Optional[Trajectory]],
    mode: str = "trajectory",
    resample: int = 64,
) -> float:
    """DTW dissimilarity between two characters, normalized by path length."""
    if resample < 8:
        raise InvalidInputError("resample must be at least 8")
    seq_a = _shape_sequence(a[0], a[1], mode, resample)
    seq_b = _shape_sequence(b[0], b[1], mode, resample)
    cost, path = dtw(seq_a, seq_b)
    return cost / len(path)


# -- dynamic metrics --------------------------------------------------------


def stroke_counts(res: SegmentationResult) -> StrokeCounts:
    visible = res.visible_strokes
    return StrokeCounts(
        primitive=len(res.strokes),
        pen_strokes=len(res.trajectory.pen_strokes),
        disjointed=len(res.disjointed_strokes),
        retraces=len(res.retrace_pairs),
        upstrokes=sum(1 for s in visible if s.updown == "up"),
        downstrokes=sum(1 for s in visible if s.updown == "down"),
    )


def stroke_length_stats(res: SegmentationResult) -> tuple[float, tuple[float, ...]]:
    lengths = tuple(s.length for s in res.visible_strokes)
    if not lengths:
        raise MetricUndefinedError("no visible strokes")
    return float(np.mean(lengths)), lengths


def changeability(res: SegmentationResult) -> float:
    up = sum(s.length for s in res.visible_strokes if s.updown == "up")
    down = sum(s.length for s in res.visible_strokes if s.updown == "down")
    if down <= 0:
        raise MetricUndefinedError("no down-stroke length; changeability undefined")
    return up / down


def disfluency(res: SegmentationResult) -> tuple[int, int]:
    """(velocity-interrupting point count, disjointed point count)."""
    junctions = sum(1 for lm in res.landmarks if lm.kind == "sharp_junction")
    extrema = sum(1 for lm in res.landmarks if lm.kind == "curvature_extremum")
    intermediate_pen_ups = len(res.trajectory.pen_strokes) - 1
    return extrema + junctions + intermediate_pen_ups, junctions + intermediate_pen_ups


def entropy_of_codes(codes: Sequence[str]) -> float:
    """Shannon entropy (nats) of a direction-code sequence."""
    if not codes:
        raise MetricUndefinedError("empty code sequence")
    _, counts = np.unique(np.asarray(codes), return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log(p)).sum())


def entropy(res: SegmentationResult) -> float:
    return entropy_of_codes([s.direction_code for s in res.visible_strokes])


def _signed_turn_deg(v_in: np.ndarray, v_out: np.ndarray) -> float:
    ang = math.degrees(
        math.atan2(v_in[0] * v_out[1] - v_in[1] * v_out[0], float(np.dot(v_in, v_out)))
    )
    return ang % 360.0


def _sector(angle: float) -> int:
    return int(math.floor(((angle + 22.5) % 360.0) / 45.0)) % 8


def angle_metrics(res: SegmentationResult) -> AngleMetrics:
    visible = res.visible_strokes
    if not visible:
        raise MetricUndefinedError("no visible strokes")
    major = max(visible, key=lambda s: (s.length, -s.index))
    g, t = res.glyph, res.trajectory
    a = t.pen_strokes[0].start(g)
    b = t.pen_strokes[-1].end(g)
    vec = b - a
    if np.linalg.norm(vec) > coincidence_tol(g):
        div_angle = math.degrees(math.atan2(vec[1], vec[0])) % 360.0
    else:
        div_angle = None
    hist = [0] * 8
    for s1, s2 in zip(visible, visible[1:]):
        turn = _signed_turn_deg(s1.end - s1.start, s2.end - s2.start)
        hist[_sector(turn)] += 1
    return AngleMetrics(
        major_angle_deg=major.net_angle,
        initial_angle_deg=visible[0].net_angle,
        divergence_angle_deg=div_angle,
        pen_drag_angles_deg=tuple(s.net_angle for s in res.pen_drags),
        inter_stroke_histogram=tuple(hist),
    )


def pen_drag_distance(res: SegmentationResult) -> float:
    return float(sum(s.length for s in res.pen_drags))


# -- cognitive metrics ------------------------------------------------------


def cognitive_counts(res: SegmentationResult, rdp_epsilon: Optional[float] = None) -> tuple[int, int]:
    """(landmark-point count incl. endpoints, RDP retained-point count)."""
    if rdp_epsilon is None:
        rdp_epsilon = 0.02 * glyph_bbox(res.glyph).diagonal
    if rdp_epsilon <= 0:
        raise InvalidInputError("rdp_epsilon must be positive")
    landmark_count = len(res.landmarks) + 2
    rdp_count = sum(len(rdp_simplify(path, rdp_epsilon)) for path in res.pen_stroke_paths)
    return landmark_count, rdp_count


# -- aggregation ------------------------------------------------------------


def compute_all(
    g: Glyph,
    t: Trajectory,
    res: SegmentationResult,
    baseline_y: Optional[float] = None,
    rdp_epsilon: Optional[float] = None,
) -> MetricRecord:
    """Every per-character metric, with explicit reasons for undefined ones."""
    if res.glyph.id != g.id or t.glyph_id != g.id:
        raise InvalidInputError("glyph / trajectory / segmentation mismatch")
    reasons: dict = {}

    def tryc(name, fn):
        try:
            return fn()
        except (MetricUndefinedError, MetricUnavailableError, DegenerateGlyphError) as e:
            reasons[name] = str(e)
            return None

    total_length = length(res)
    div = divergence(g, t)
    area = size(g)
    baseline = baseline_y if baseline_y is not None else g.baseline_y
    asc_desc = tryc("ascendancy_pct", lambda: ascendancy_descendance(res, baseline))
    if asc_desc is None and "ascendancy_pct" in reasons:
        reasons["descendance_pct"] = reasons["ascendancy_pct"]
    counts = stroke_counts(res)
    avg_len, len_list = stroke_length_stats(res)
    disf, disjoint_pts = disfluency(res)
    lm_count, rdp_count = cognitive_counts(res, rdp_epsilon)
    angle_sum, crossings = complexity_factors(res)

    return MetricRecord(
        glyph_id=g.id,
        length=total_length,
        divergence=div,
        size=area,
        lb_index=tryc("lb_index", lambda: lb_index(g)),
        avg_curvature=avg_curvature(res),
        compactness=tryc("compactness", lambda: compactness(total_length, area)),
        openness=tryc("openness", lambda: openness(div, total_length)),
        ascendancy_pct=asc_desc[0] if asc_desc else None,
        descendance_pct=asc_desc[1] if asc_desc else None,
        circularity=tryc("circularity", lambda: circularity(g)),
        rectangularity=tryc("rectangularity", lambda: rectangularity(g)),
        inter_stroke_angle_sum_deg=angle_sum,
        crossings=crossings,
        counts=counts,
        avg_stroke_length=avg_len,
        stroke_length_list=len_list,
        changeability=tryc("changeability", lambda: changeability(res)),
        disfluency=disf,
        disjoint_count=disjoint_pts,
        entropy_nats=entropy(res),
        pen_drag_distance=pen_drag_distance(res),
        landmark_count=lm_count,
        rdp_point_count=rdp_count,
        angles=angle_metrics(res),
        reasons=reasons,
    )


SCALAR_FIELDS = (
    "length",
    "divergence",
    "size",
    "lb_index",
    "avg_curvature",
    "compactness",
    "openness",
    "ascendancy_pct",
    "descendance_pct",
    "circularity",
    "rectangularity",
    "inter_stroke_angle_sum_deg",
    "crossings",
    "avg_stroke_length",
    "changeability",
    "disfluency",
    "disjoint_count",
    "entropy_nats",
    "pen_drag_distance",
    "landmark_count",
    "rdp_point_count",
    "counts_primitive",
    "counts_pen_strokes",
    "counts_disjointed",
    "counts_retraces",
    "counts_upstrokes",
    "counts_downstrokes",
    "angles_major_angle_deg",
    "angles_initial_angle_deg",
    "angles_divergence_angle_deg",
)


def record_to_dict(rec: MetricRecord) -> dict:
    """Flatten a record to scalar columns plus serialized list columns."""
    out = {"glyph_id": rec.glyph_id}
    for name in SCALAR_FIELDS:
        if name.startswith("counts_"):
            out[name] = getattr(rec.counts, name[len("counts_") :])
        elif name.startswith("angles_"):
            out[name] = getattr(rec.angles, name[len("angles_") :])
        else:
            out[name] = getattr(rec, name)
    out["stroke_length_list"] = " ".join(f"{v:.6g}" for v in rec.stroke_length_list)
    out["angles_pen_drag_angles_deg"] = " ".join(f"{v:.6g}" for v in rec.angles.pen_drag_angles_deg)
    out["angles_inter_stroke_histogram"] = " ".join(str(v) for v in rec.angles.inter_stroke_histogram)
    return out
