"""HTTP annotation service: candidate browsing, trajectory selection,
landmark override and live metric recomputation over a single corpus file.

Mutations are serialized through a single-writer lock and guarded by an
optimistic revision check: every mutating request must echo the revision it
last saw, otherwise it receives 409 and no state changes.
"""

from __future__ import annotations

import threading
from dataclasses import replace
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from . import corpus_io, metrics, reconstruction, segmentation
from .errors import GlyphometricsError, InvalidInputError
from .geometry import Point
from .glyph_model import Glyph, LandmarkPoint, Trajectory, validate_trajectory

__all__ = ["SessionState", "create_app"]


class SessionState:
    """Open corpus document plus a monotonic revision counter."""

    def __init__(self, corpus_path: str):
        self.path = corpus_path
        self.doc = corpus_io.load_corpus(corpus_path)
        self.revision = 0
        self.dirty = False
        self.lock = threading.Lock()

    def bump(self) -> None:
        self.revision += 1
        self.dirty = True


# -- request bodies ---------------------------------------------------------


class ReconstructBody(BaseModel):
    weights: Optional[dict] = None
    top: int = 5
    revision: Optional[int] = None


class TrajectoryBody(BaseModel):
    revision: int
    candidate_index: Optional[int] = None
    trajectory: Optional[dict] = None


class LandmarkEdit(BaseModel):
    location: tuple[float, float]
    kind: str = "sharp_junction"


class LandmarksBody(BaseModel):
    revision: int
    add: list[LandmarkEdit] = []
    remove: list[int] = []


class SaveBody(BaseModel):
    revision: int


# -- serialization helpers --------------------------------------------------


def _glyph_payload(state: SessionState, g: Glyph) -> dict:
    doc = state.doc
    t = doc.trajectories.get(g.id)
    payload = {
        "revision": state.revision,
        "id": g.id,
        "script_id": g.script_id,
        "label": g.label,
        "baseline_y": g.baseline_y if g.baseline_y is not None else doc.corpus.baseline_y,
        "usage_frequency": g.usage_frequency,
        "segments": [corpus_io._seg_to_dict(s) for s in g.segments],
        "trajectory": None if t is None else corpus_io._traj_to_dict(t),
        "candidates": [corpus_io._traj_to_dict(c) for c in doc.candidates.get(g.id, [])],
        "landmarks": [],
        "manual_landmarks": [corpus_io._landmark_to_dict(lm) for lm in doc.manual_landmarks.get(g.id, [])],
        "metrics": None,
    }
    if t is not None:
        res = segmentation.segment(g, t)
        res = segmentation.apply_landmark_edits(res, doc.manual_landmarks.get(g.id, []))
        payload["landmarks"] = [corpus_io._landmark_to_dict(lm) for lm in res.landmarks]
        baseline = g.baseline_y if g.baseline_y is not None else doc.corpus.baseline_y
        rec = metrics.compute_all(g, t, res, baseline_y=baseline)
        payload["metrics"] = corpus_io.record_to_dict(rec)
        payload["metric_reasons"] = dict(rec.reasons)
    return payload


def _get_glyph(state: SessionState, glyph_id: str) -> Glyph:
    try:
        return state.doc.corpus.glyph(glyph_id)
    except KeyError:
        raise HTTPException(status_code=404, detail=f"unknown glyph id {glyph_id!r}")


def _check_revision(state: SessionState, revision: Optional[int]) -> None:
    if revision is not None and revision != state.revision:
        raise HTTPException(
            status_code=409,
            detail={"expected": state.revision, "got": revision},
        )


# -- application factory ----------------------------------------------------


def create_app(corpus_path: str) -> FastAPI:
    state = SessionState(corpus_path)
    app = FastAPI(title="glyphometrics annotation service")
    app.state.session = state

    @app.get("/corpus")
    def get_corpus():
        c = state.doc.corpus
        return {
            "revision": state.revision,
            "dirty": state.dirty,
            "id": c.id,
            "name": c.name,
            "baseline_y": c.baseline_y,
            "glyphs": [
                {
                    "id": g.id,
                    "label": g.label,
                    "n_segments": len(g.segments),
                    "has_trajectory": g.id in state.doc.trajectories,
                    "n_candidates": len(state.doc.candidates.get(g.id, [])),
                }
                for g in c.glyphs
            ],
        }

    @app.get("/glyphs/{glyph_id}")
    def get_glyph(glyph_id: str):
        g = _get_glyph(state, glyph_id)
        try:
            return _glyph_payload(state, g)
        except GlyphometricsError as e:
            raise HTTPException(status_code=422, detail=str(e))

    @app.post("/glyphs/{glyph_id}/reconstruct")
    def post_reconstruct(glyph_id: str, body: ReconstructBody):
        g = _get_glyph(state, glyph_id)
        with state.lock:
            _check_revision(state, body.revision)
            cfg = reconstruction.ReconstructionConfig(max_candidates=body.top)
            if body.weights:
                allowed = {
                    "pen_up": "pen_up_cost",
                    "turn": "turn_cost_per_degree",
                    "retrace": "retrace_cost_per_length",
                    "start_prior": "start_prior_cost",
                }
                unknown = set(body.weights) - set(allowed)
                if unknown:
                    raise HTTPException(status_code=422, detail=f"unknown weights {sorted(unknown)}")
                cfg = replace(cfg, **{allowed[k]: float(v) for k, v in body.weights.items()})
            try:
                cands = reconstruction.reconstruct(g, cfg)
            except GlyphometricsError as e:
                raise HTTPException(status_code=422, detail=str(e))
            state.doc.candidates[g.id] = [c.trajectory for c in cands]
            if g.id not in state.doc.trajectories:
                state.doc.trajectories[g.id] = cands[0].trajectory
            state.bump()
            return {
                "revision": state.revision,
                "candidates": [
                    {
                        "index": i,
                        "score": c.score,
                        "breakdown": c.score_breakdown,
                        "pen_strokes": len(c.trajectory.pen_strokes),
                        "trajectory": corpus_io._traj_to_dict(c.trajectory),
                    }
                    for i, c in enumerate(cands)
                ],
            }

    @app.put("/glyphs/{glyph_id}/trajectory")
    def put_trajectory(glyph_id: str, body: TrajectoryBody):
        g = _get_glyph(state, glyph_id)
        with state.lock:
            _check_revision(state, body.revision)
            if (body.candidate_index is None) == (body.trajectory is None):
                raise HTTPException(
                    status_code=422, detail="provide exactly one of candidate_index or trajectory"
                )
            if body.candidate_index is not None:
                cands = state.doc.candidates.get(g.id, [])
                if not 0 <= body.candidate_index < len(cands):
                    raise HTTPException(
                        status_code=422,
                        detail=f"candidate_index {body.candidate_index} out of range (have {len(cands)})",
                    )
                t = replace(cands[body.candidate_index], provenance="manual")
            else:
                try:
                    t = corpus_io._traj_from_dict(g.id, body.trajectory, "trajectory")
                    t = replace(t, provenance="manual")
                except GlyphometricsError as e:
                    raise HTTPException(status_code=422, detail=str(e))
            problems = validate_trajectory(g, t)
            if problems:
                raise HTTPException(status_code=422, detail=problems)
            state.doc.trajectories[g.id] = t
            state.bump()
            return _glyph_payload(state, g)

    @app.patch("/glyphs/{glyph_id}/landmarks")
    def patch_landmarks(glyph_id: str, body: LandmarksBody):
        g = _get_glyph(state, glyph_id)
        with state.lock:
            _check_revision(state, body.revision)
            t = state.doc.trajectories.get(g.id)
            if t is None:
                raise HTTPException(status_code=422, detail="glyph has no trajectory yet")
            edits = list(state.doc.manual_landmarks.get(g.id, []))
            base = segmentation.segment(g, t)
            current = segmentation.apply_landmark_edits(base, edits).landmarks
            for idx in body.remove:
                if not 0 <= idx < len(current):
                    raise HTTPException(status_code=422, detail=f"landmark index {idx} out of range")
            removed_locations = [current[i].location for i in body.remove]
            new_edits = list(edits)
            for loc in removed_locations:
                # removing a manual addition cancels it; otherwise suppress the
                # automatic landmark at that location
                for e in list(new_edits):
                    if e.source == "manual" and abs(e.location.x - loc.x) < 1e-9 and abs(e.location.y - loc.y) < 1e-9:
                        new_edits.remove(e)
                        break
                else:
                    new_edits.append(LandmarkPoint(loc, "suppressed", source="suppressed"))
            for a in body.add:
                new_edits.append(
                    LandmarkPoint(Point(a.location[0], a.location[1]), a.kind, source="manual")
                )
            try:
                segmentation.apply_landmark_edits(base, new_edits)
            except InvalidInputError as e:
                raise HTTPException(status_code=422, detail=str(e))
            state.doc.manual_landmarks[g.id] = new_edits
            state.bump()
            return _glyph_payload(state, g)

    @app.get("/script/stats")
    def get_stats():
        from . import script_analysis

        doc = state.doc
        records, items = [], []
        skipped = []
        for g in doc.corpus.glyphs:
            t = doc.trajectories.get(g.id)
            if t is None:
                skipped.append(g.id)
                continue
            res = segmentation.segment(g, t)
            res = segmentation.apply_landmark_edits(res, doc.manual_landmarks.get(g.id, []))
            baseline = g.baseline_y if g.baseline_y is not None else doc.corpus.baseline_y
            records.append(metrics.compute_all(g, t, res, baseline_y=baseline))
            items.append((g, t))
        if not records:
            raise HTTPException(status_code=422, detail="no glyphs with trajectories")
        subset = replace(
            doc.corpus, glyphs=tuple(g for g, _ in items)
        )
        sm = script_analysis.aggregate(subset, records, weighting="frequency")
        out = {
            "revision": state.revision,
            "script_id": sm.script_id,
            "means": sm.means,
            "weighted_means": sm.weighted_means,
            "histograms": {
                name: {"edges": list(h.edges), "counts": list(h.counts)}
                for name, h in sm.histograms.items()
            },
            "skipped": skipped,
        }
        if len(items) >= 2:
            matrix = script_analysis.similarity_matrix(items)
            out["similarity"] = {
                "glyph_ids": list(matrix.glyph_ids),
                "values": [[None if v != v else v for v in row] for row in matrix.values.tolist()],
                "failed": list(matrix.failed),
            }
        return out

    @app.post("/save")
    def post_save(body: SaveBody):
        with state.lock:
            _check_revision(state, body.revision)
            corpus_io.save_corpus(state.doc, state.path)
            state.dirty = False
            return {"revision": state.revision, "path": state.path, "dirty": False}

    return app


def serve(corpus_path: str, port: int = 8000) -> None:
    import uvicorn

    uvicorn.run(create_app(corpus_path), host="127.0.0.1", port=port)
