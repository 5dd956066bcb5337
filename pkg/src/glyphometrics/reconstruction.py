"""Recovery of candidate writing trajectories from a static glyph.

Traversals of the segment graph are enumerated (exhaustively for small glyphs,
beam search otherwise) and scored by an effort heuristic: pen lifts, turning at
junctions, retraced ink and an unnatural-start prior. The pen is lifted only
when the current junction has no untraversed ink left.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidInputError, ReconstructionFailedError
from .geometry import Point
from .glyph_model import DirectedPass, Glyph, PenStroke, Trajectory, coincidence_tol
from .segmentation import _turn_angle_deg

__all__ = [
    "SegmentGraph",
    "CandidateTrajectory",
    "ReconstructionConfig",
    "build_segment_graph",
    "reconstruct",
    "select_trajectory",
    "score_trajectory",
]


@dataclass(frozen=True)
class ReconstructionConfig:
    pen_up_cost: float = 10.0
    turn_cost_per_degree: float = 0.02
    retrace_cost_per_length: float = 5.0
    start_prior_cost: float = 1.0
    max_candidates: int = 5
    beam_width: int = 64
    exhaustive_segment_limit: int = 10
    search_budget: int = 200_000

    def __post_init__(self):
        if self.max_candidates < 1:
            raise InvalidInputError("max_candidates must be at least 1")
        for name in ("pen_up_cost", "turn_cost_per_degree", "retrace_cost_per_length", "start_prior_cost"):
            if getattr(self, name) < 0:
                raise InvalidInputError(f"{name} must be non-negative")


@dataclass(frozen=True)
class Edge:
    segment_index: int
    node_a: int  # node at parameter 0
    node_b: int  # node at parameter 1


@dataclass(frozen=True)
class SegmentGraph:
    nodes: tuple[Point, ...]
    edges: tuple[Edge, ...]
    adjacency: dict  # node index -> list of (edge_index, at_parameter_one)


@dataclass(frozen=True)
class CandidateTrajectory:
    trajectory: Trajectory
    score: float
    score_breakdown: dict


def build_segment_graph(g: Glyph) -> SegmentGraph:
    """Merge segment endpoints within coincidence tolerance into graph nodes."""
    tol = coincidence_tol(g)
    nodes: list[np.ndarray] = []

    def node_of(p: np.ndarray) -> int:
        for i, q in enumerate(nodes):
            if np.linalg.norm(p - q) <= tol:
                return i
        nodes.append(p)
        return len(nodes) - 1

    edges = []
    for si, seg in enumerate(g.segments):
        a = node_of(seg.point_at(0.0))
        b = node_of(seg.point_at(1.0))
        edges.append(Edge(si, a, b))

    adjacency: dict[int, list[tuple[int, bool]]] = {i: [] for i in range(len(nodes))}
    for ei, e in enumerate(edges):
        adjacency[e.node_a].append((ei, False))
        if e.node_b != e.node_a:
            adjacency[e.node_b].append((ei, True))
        else:
            adjacency[e.node_a].append((ei, True))  # self-loop: both orientations
    return SegmentGraph(
        nodes=tuple(Point(float(p[0]), float(p[1])) for p in nodes),
        edges=tuple(edges),
        adjacency=adjacency,
    )


# -- scoring ----------------------------------------------------------------


def _segment_tangents(g: Glyph) -> list[tuple[np.ndarray, np.ndarray]]:
    out = []
    for seg in g.segments:
        d0 = seg.derivatives_at(1e-4, 1)
        d1 = seg.derivatives_at(1.0 - 1e-4, 1)
        out.append((np.asarray(d0, dtype=float), np.asarray(d1, dtype=float)))
    return out


def _pass_tangents(tangents, p: DirectedPass) -> tuple[np.ndarray, np.ndarray]:
    """(outgoing tangent at pass start, incoming tangent at pass end)."""
    t0, t1 = tangents[p.segment_index]
    if p.reversed:
        return -t1, -t0
    return t0, t1


def _best_start_node(graph: SegmentGraph) -> int:
    return max(range(len(graph.nodes)), key=lambda i: (graph.nodes[i].y, -graph.nodes[i].x))


def _start_penalties(graph: SegmentGraph, start_node: int, out_tangent: np.ndarray, cfg: ReconstructionConfig) -> float:
    cost = 0.0
    if start_node != _best_start_node(graph):
        cost += cfg.start_prior_cost
    n = float(np.linalg.norm(out_tangent))
    if n > 0:
        dx, dy = out_tangent / n
        if not (dy < -1e-9 or dx > 1e-9):
            cost += cfg.start_prior_cost
    return cost


def _segment_lengths(g: Glyph) -> list[float]:
    out = []
    for seg in g.segments:
        pts = seg.sample(256)
        out.append(float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum()))
    return out


def score_trajectory(g: Glyph, t: Trajectory, cfg: ReconstructionConfig = ReconstructionConfig()) -> tuple[float, dict]:
    """Score an arbitrary trajectory with the reconstruction cost function."""
    graph = build_segment_graph(g)
    tangents = _segment_tangents(g)
    lengths = _segment_lengths(g)

    pen_ups = len(t.pen_strokes) - 1
    turn_sum = 0.0
    retraced = 0.0
    for stroke in t.pen_strokes:
        prev_in = None
        for p in stroke.passes:
            out_tan, in_tan = _pass_tangents(tangents, p)
            if prev_in is not None:
                turn_sum += _turn_angle_deg(prev_in, out_tan)
            prev_in = in_tan
            if p.retrace:
                retraced += lengths[p.segment_index]
    first = t.pen_strokes[0].passes[0]
    start_node = _node_of_pass_start(graph, first)
    out_tan, _ = _pass_tangents(tangents, first)
    breakdown = {
        "pen_up": cfg.pen_up_cost * pen_ups,
        "turn": cfg.turn_cost_per_degree * turn_sum,
        "retrace": cfg.retrace_cost_per_length * retraced,
        "start_prior": _start_penalties(graph, start_node, out_tan, cfg),
    }
    return sum(breakdown.values()), breakdown


def _node_of_pass_start(graph: SegmentGraph, p: DirectedPass) -> int:
    e = graph.edges[p.segment_index]
    return e.node_b if p.reversed else e.node_a


# -- search -----------------------------------------------------------------


class _Budget(Exception):
    pass


@dataclass
class _State:
    passes: tuple  # tuple of (edge_index, reversed, new_stroke)
    done: int  # bitmask
    node: int
    in_tangent: Optional[np.ndarray]
    turn_sum: float
    pen_ups: int
    start_cost: float

    def cost(self, cfg: ReconstructionConfig) -> float:
        return (
            cfg.pen_up_cost * self.pen_ups
            + cfg.turn_cost_per_degree * self.turn_sum
            + self.start_cost
        )


def _moves(graph: SegmentGraph, state: _State) -> list[tuple[int, bool, bool]]:
    """Continuation moves from the current node, or pen-up jumps when stuck."""
    cont = [
        (ei, at_b, False)
        for ei, at_b in graph.adjacency[state.node]
        if not state.done >> ei & 1
    ]
    if cont:
        return cont
    jumps = []
    for ei, e in enumerate(graph.edges):
        if state.done >> ei & 1:
            continue
        jumps.append((ei, False, True))
        jumps.append((ei, True, True))
    return jumps


def _apply(graph: SegmentGraph, tangents, cfg, state: _State, move) -> _State:
    ei, rev, new_stroke = move
    e = graph.edges[ei]
    p = DirectedPass(e.segment_index, reversed=rev)
    out_tan, in_tan = _pass_tangents(tangents, p)
    turn = state.turn_sum
    if not new_stroke and state.in_tangent is not None:
        turn += _turn_angle_deg(state.in_tangent, out_tan)
    start_cost = state.start_cost
    if not state.passes:
        start_node = e.node_b if rev else e.node_a
        start_cost = _start_penalties(graph, start_node, out_tan, cfg)
    return _State(
        passes=state.passes + ((ei, rev, new_stroke),),
        done=state.done | 1 << ei,
        node=e.node_a if rev else e.node_b,
        in_tangent=in_tan,
        turn_sum=turn,
        pen_ups=state.pen_ups + (1 if new_stroke and state.passes else 0),
        start_cost=start_cost,
    )


def _enumerate_exhaustive(graph: SegmentGraph, tangents, cfg: ReconstructionConfig) -> list[_State]:
    full = (1 << len(graph.edges)) - 1
    results: list[_State] = []
    counter = 0

    def dfs(state: _State):
        nonlocal counter
        counter += 1
        if counter > cfg.search_budget:
            raise _Budget
        if state.done == full:
            results.append(state)
            return
        for move in _moves(graph, state):
            dfs(_apply(graph, tangents, cfg, state, move))

    root = _State((), 0, -1, None, 0.0, 0, 0.0)
    for ei in range(len(graph.edges)):
        for rev in (False, True):
            dfs(_apply(graph, tangents, cfg, root, (ei, rev, True)))
    return results


def _beam_search(graph: SegmentGraph, tangents, cfg: ReconstructionConfig) -> list[_State]:
    full = (1 << len(graph.edges)) - 1
    frontier = []
    root = _State((), 0, -1, None, 0.0, 0, 0.0)
    for ei in range(len(graph.edges)):
        for rev in (False, True):
            frontier.append(_apply(graph, tangents, cfg, root, (ei, rev, True)))
    results: list[_State] = []
    depth = 1
    while frontier:
        frontier.sort(key=lambda s: (s.cost(cfg), s.pen_ups))
        frontier = frontier[: cfg.beam_width]
        nxt = []
        for state in frontier:
            if state.done == full:
                results.append(state)
                continue
            for move in _moves(graph, state):
                nxt.append(_apply(graph, tangents, cfg, state, move))
        frontier = nxt
        depth += 1
        if depth > len(graph.edges) + 2:
            break
    return results


def _to_candidate(g: Glyph, graph: SegmentGraph, cfg: ReconstructionConfig, state: _State) -> CandidateTrajectory:
    strokes: list[list[DirectedPass]] = []
    for ei, rev, new_stroke in state.passes:
        p = DirectedPass(graph.edges[ei].segment_index, reversed=rev)
        if new_stroke or not strokes:
            strokes.append([p])
        else:
            strokes[-1].append(p)
    traj = Trajectory(
        glyph_id=g.id,
        pen_strokes=tuple(PenStroke(tuple(s)) for s in strokes),
        provenance="reconstructed",
    )
    breakdown = {
        "pen_up": cfg.pen_up_cost * state.pen_ups,
        "turn": cfg.turn_cost_per_degree * state.turn_sum,
        "retrace": 0.0,
        "start_prior": state.start_cost,
    }
    return CandidateTrajectory(traj, sum(breakdown.values()), breakdown)


def reconstruct(g: Glyph, cfg: ReconstructionConfig = ReconstructionConfig()) -> list[CandidateTrajectory]:
    """Ranked candidate trajectories covering every glyph segment once."""
    if len(g.segments) < 1:
        raise InvalidInputError("glyph has no segments")
    graph = build_segment_graph(g)
    tangents = _segment_tangents(g)

    states: list[_State] = []
    if len(g.segments) <= cfg.exhaustive_segment_limit:
        try:
            states = _enumerate_exhaustive(graph, tangents, cfg)
        except _Budget:
            states = []
    if not states:
        states = _beam_search(graph, tangents, cfg)
    if not states:
        raise ReconstructionFailedError(f"no viable traversal found for glyph {g.id!r}")

    candidates = [_to_candidate(g, graph, cfg, s) for s in states]
    seen = set()
    unique = []
    for c in candidates:
        key = tuple((p.segment_index, p.reversed) for ps in c.trajectory.pen_strokes for p in ps.passes)
        key = (key, len(c.trajectory.pen_strokes))
        if key not in seen:
            seen.add(key)
            unique.append(c)

    def sort_key(c: CandidateTrajectory):
        start = c.trajectory.pen_strokes[0].start(g)
        return (c.score, len(c.trajectory.pen_strokes), -start[1], start[0], _traj_key(c.trajectory))

    unique.sort(key=sort_key)
    return unique[: cfg.max_candidates]


def _traj_key(t: Trajectory):
    return tuple((p.segment_index, p.reversed, p.retrace) for ps in t.pen_strokes for p in ps.passes)


def select_trajectory(g: Glyph, candidates: Sequence[CandidateTrajectory], choice: int) -> Trajectory:
    """Pick one candidate; re-validates coverage before returning it."""
    if not 0 <= choice < len(candidates):
        raise InvalidInputError(f"candidate index {choice} out of range (0..{len(candidates) - 1})")
    from .glyph_model import validate_trajectory

    traj = candidates[choice].trajectory
    problems = validate_trajectory(g, traj)
    if problems:
        raise ReconstructionFailedError("; ".join(problems))
    return traj
