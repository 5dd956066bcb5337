"""Synthetic fixture glyphs and corpora.

The character data analyzed here is generated, not digitized: a worked multi
stroke character with a retrace, an S-shaped curve, geometric primitives and
randomized corpora for property suites.
"""

from __future__ import annotations

import math
import random

import numpy as np
from scipy.interpolate import make_interp_spline

from .geometry import SplineSegment
from .glyph_model import DirectedPass, Glyph, PenStroke, ScriptCorpus, Trajectory

__all__ = [
    "segment_through",
    "line_glyph",
    "circle_glyph",
    "square_glyph",
    "s_glyph",
    "worked_character",
    "random_smooth_glyph",
    "reconstruction_suite",
    "script_stage_corpus",
]


def segment_through(points) -> SplineSegment:
    """Cubic segment interpolating the given points exactly (chord params)."""
    pts = np.asarray(points, dtype=float)
    d = np.linalg.norm(np.diff(pts, axis=0), axis=1)
    u = np.concatenate([[0.0], np.cumsum(d)])
    u /= u[-1]
    keep = np.concatenate([[True], np.diff(u) > 1e-12])
    u, pts = u[keep], pts[keep]
    while len(pts) < 4:
        i = int(np.argmax(np.diff(u)))
        u = np.insert(u, i + 1, 0.5 * (u[i] + u[i + 1]))
        pts = np.insert(pts, i + 1, 0.5 * (pts[i] + pts[i + 1])[None, :], axis=0)
    spl = make_interp_spline(u, pts, k=3)
    return SplineSegment.from_arrays(spl.c, spl.t)


def _unistroke(glyph_id: str, n_segments: int) -> Trajectory:
    passes = tuple(DirectedPass(i) for i in range(n_segments))
    return Trajectory(glyph_id, (PenStroke(passes),), provenance="recorded")


def line_glyph(p0=(0.0, 0.0), p1=(1.0, 1.0), glyph_id="line", script_id="fixture") -> tuple[Glyph, Trajectory]:
    g = Glyph(glyph_id, script_id, (SplineSegment.line(p0, p1),))
    return g, _unistroke(glyph_id, 1)


def circle_glyph(radius: float = 1.0, center=(0.0, 0.0), glyph_id="circle", script_id="fixture", n: int = 48) -> tuple[Glyph, Trajectory]:
    th = np.linspace(0.0, 2.0 * math.pi, n)
    pts = np.stack([center[0] + radius * np.cos(th), center[1] + radius * np.sin(th)], axis=1)
    g = Glyph(glyph_id, script_id, (segment_through(pts),))
    return g, _unistroke(glyph_id, 1)


def square_glyph(side: float = 1.0, glyph_id="square", script_id="fixture") -> tuple[Glyph, Trajectory]:
    """Unit square outline as 4 line segments written in one pen stroke."""
    s = side
    corners = [(0, s), (s, s), (s, 0), (0, 0), (0, s)]
    segs = tuple(SplineSegment.line(a, b) for a, b in zip(corners, corners[1:]))
    g = Glyph(glyph_id, script_id, segs)
    return g, _unistroke(glyph_id, 4)


def s_glyph(glyph_id="s", script_id="fixture") -> tuple[Glyph, Trajectory]:
    """Shallow S-shaped single stroke: two bends of opposite curvature."""
    y = np.linspace(1.0, -1.0, 48)
    x = 0.15 * np.sin(math.pi * y)
    g = Glyph(glyph_id, script_id, (segment_through(np.stack([x, y], axis=1)),))
    return g, _unistroke(glyph_id, 1)


def worked_character(glyph_id="worked", script_id="fixture") -> tuple[Glyph, Trajectory]:
    """Multi-movement character: a 3-bend wave into a retraced hook.

    One pen stroke, three movements (the third retraces the second), six
    velocity-interrupting points: 3 + 1 curvature extrema plus the junction
    and the reversal point.
    """
    # movement 1: wave descending to the junction at the origin
    yy = np.linspace(2.5, 0.0, 80)
    xx = 0.4 * np.sin(yy * 3.0 * math.pi / 2.5)
    wave = segment_through(np.stack([xx, yy], axis=1))

    # movement 2: parabolic hook from the junction, vertex mid-curve
    u = np.linspace(-1.0, 1.0, 80)
    base = np.stack([u, 0.55 * (1.0 - u * u)], axis=1)
    th = math.radians(55.0)
    rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    hook = (base - base[0]) @ rot.T  # starts exactly at the origin
    hook_seg = segment_through(hook)

    g = Glyph(glyph_id, script_id, (wave, hook_seg))
    traj = Trajectory(
        glyph_id,
        (
            PenStroke(
                (
                    DirectedPass(0),
                    DirectedPass(1),
                    DirectedPass(1, reversed=True, retrace=True),
                )
            ),
        ),
        provenance="recorded",
    )
    return g, traj


# -- randomized corpora -----------------------------------------------------


def _wobbly_segment(rng: random.Random, start: np.ndarray, end: np.ndarray, curviness: float) -> SplineSegment:
    chord = end - start
    n = np.array([-chord[1], chord[0]])
    nn = np.linalg.norm(n)
    n = n / nn if nn > 0 else np.array([0.0, 1.0])
    m1 = start + chord / 3.0 + n * curviness * np.linalg.norm(chord) * rng.uniform(-1, 1)
    m2 = start + 2.0 * chord / 3.0 + n * curviness * np.linalg.norm(chord) * rng.uniform(-1, 1)
    return segment_through(np.array([start, m1, m2, end]))


def random_smooth_glyph(
    rng: random.Random,
    glyph_id: str,
    script_id: str = "random",
    n_segments: int = 3,
    curviness: float = 0.2,
    pen_up_prob: float = 0.0,
    baseline_y=None,
    usage_frequency=None,
) -> tuple[Glyph, Trajectory]:
    """Connected writing-like glyph generated from a known trajectory.

    The path starts at its topmost point and drifts down/right, so the
    generating order is also the natural writing order.
    """
    segs = []
    strokes: list[list[DirectedPass]] = [[]]
    pos = np.array([0.0, 0.0])
    for i in range(n_segments):
        if i > 0 and rng.random() < pen_up_prob:
            pos = pos + np.array([rng.uniform(0.6, 1.2), rng.uniform(-0.4, 0.1)])
            strokes.append([])
        step = np.array([rng.uniform(-0.2, 0.9), rng.uniform(-1.0, -0.25)])
        end = pos + step
        segs.append(_wobbly_segment(rng, pos, end, curviness))
        strokes[-1].append(DirectedPass(i))
        pos = end
    g = Glyph(
        glyph_id,
        script_id,
        tuple(segs),
        baseline_y=baseline_y,
        usage_frequency=usage_frequency,
    )
    traj = Trajectory(glyph_id, tuple(PenStroke(tuple(s)) for s in strokes), provenance="recorded")
    return g, traj


def reconstruction_suite(n: int = 20, seed: int = 7) -> list[tuple[Glyph, Trajectory]]:
    """Glyphs with known generating trajectories, <= 8 segments each."""
    rng = random.Random(seed)
    out = []
    for i in range(n):
        n_seg = rng.randint(2, 8)
        pen_up = 0.25 if i % 3 == 0 else 0.0
        out.append(
            random_smooth_glyph(
                rng,
                glyph_id=f"suite_{i:02d}",
                script_id="suite",
                n_segments=n_seg,
                curviness=rng.uniform(0.05, 0.25),
                pen_up_prob=pen_up,
            )
        )
    return out


_STAGE_PARAMS = {
    1: dict(seg_lo=2, seg_hi=3, curviness=0.08, pen_up=0.0),
    2: dict(seg_lo=3, seg_hi=5, curviness=0.18, pen_up=0.15),
    3: dict(seg_lo=4, seg_hi=6, curviness=0.3, pen_up=0.25),
}


def script_stage_corpus(stage: int, n_glyphs: int = 12, seed: int = 11) -> tuple[ScriptCorpus, dict[str, Trajectory]]:
    """A synthetic script stage: later stages are curvier and more fragmented."""
    p = _STAGE_PARAMS[stage]
    rng = random.Random(seed * 100 + stage)
    glyphs = []
    trajectories = {}
    for i in range(n_glyphs):
        gid = f"t{stage}_{i:02d}"
        g, traj = random_smooth_glyph(
            rng,
            glyph_id=gid,
            script_id=f"tamil{stage}",
            n_segments=rng.randint(p["seg_lo"], p["seg_hi"]),
            curviness=p["curviness"],
            pen_up_prob=p["pen_up"],
            baseline_y=-1.0,
            usage_frequency=round(rng.uniform(0.5, 5.0), 3),
        )
        glyphs.append(g)
        trajectories[gid] = traj
    corpus = ScriptCorpus(
        id=f"tamil{stage}",
        name=f"Synthetic stage {stage}",
        glyphs=tuple(glyphs),
        baseline_y=-1.0,
    )
    return corpus, trajectories
