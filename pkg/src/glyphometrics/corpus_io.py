"""Corpus persistence and CSV export.

The on-disk corpus format is JSON: glyph segments as cubic B-spline
{degree, control_points, knots} records, trajectories as ordered directed
segment references grouped into pen strokes. Canonical form (sorted keys,
floats rounded to 9 decimals) makes save/load a byte-identical fixpoint.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (
    CorpusFormatError,
    InvalidInputError,
    ReferentialIntegrityError,
    UnsupportedVersionError,
)
from .geometry import Point, SplineSegment, as_point_array
from .glyph_model import (
    DirectedPass,
    Glyph,
    LandmarkPoint,
    PenStroke,
    ScriptCorpus,
    Trajectory,
)
from .metrics import SCALAR_FIELDS, MetricRecord, record_to_dict

FORMAT_VERSION = "1.0"

__all__ = [
    "FORMAT_VERSION",
    "CorpusDocument",
    "load_corpus",
    "save_corpus",
    "document_to_dict",
    "document_from_dict",
    "export_metrics_csv",
    "export_means_csv",
    "export_histograms_csv",
    "export_similarity_csv",
    "export_parallel_coordinates_csv",
    "atomic_write_text",
]


@dataclass
class CorpusDocument:
    corpus: ScriptCorpus
    trajectories: dict[str, Trajectory] = field(default_factory=dict)
    manual_landmarks: dict[str, list[LandmarkPoint]] = field(default_factory=dict)
    # persisted reconstruction candidates: glyph_id -> list of Trajectory
    candidates: dict[str, list[Trajectory]] = field(default_factory=dict)
    format_version: str = FORMAT_VERSION


def _round(x: float) -> float:
    return round(float(x), 9)


def _seg_to_dict(seg: SplineSegment) -> dict:
    return {
        "degree": seg.degree,
        "control_points": [[_round(p.x), _round(p.y)] for p in seg.control_points],
        "knots": [_round(k) for k in seg.knots],
    }


def _seg_from_dict(d: dict, where: str) -> SplineSegment:
    try:
        if d["degree"] != 3:
            raise CorpusFormatError(f"{where}: only cubic segments supported, got degree {d['degree']}")
        ctrl = np.asarray(d["control_points"], dtype=float)
        knots = np.asarray(d["knots"], dtype=float)
        return SplineSegment.from_arrays(ctrl, knots)
    except (KeyError, TypeError, ValueError) as e:
        raise CorpusFormatError(f"{where}: malformed segment ({e})") from e


def _traj_to_dict(t: Trajectory) -> dict:
    return {
        "provenance": t.provenance,
        "pen_strokes": [
            [
                {"segment_index": p.segment_index, "reversed": p.reversed, "retrace": p.retrace}
                for p in stroke.passes
            ]
            for stroke in t.pen_strokes
        ],
    }


def _traj_from_dict(glyph_id: str, d: dict, where: str) -> Trajectory:
    try:
        strokes = tuple(
            PenStroke(
                tuple(
                    DirectedPass(
                        int(p["segment_index"]),
                        bool(p.get("reversed", False)),
                        bool(p.get("retrace", False)),
                    )
                    for p in stroke
                )
            )
            for stroke in d["pen_strokes"]
        )
        return Trajectory(glyph_id, strokes, provenance=d.get("provenance", "reconstructed"))
    except (KeyError, TypeError, ValueError) as e:
        raise CorpusFormatError(f"{where}: malformed trajectory ({e})") from e


def _landmark_to_dict(lm: LandmarkPoint) -> dict:
    return {
        "location": [_round(lm.location.x), _round(lm.location.y)],
        "kind": lm.kind,
        "source": lm.source,
    }


def _landmark_from_dict(d: dict, where: str) -> LandmarkPoint:
    try:
        x, y = d["location"]
        return LandmarkPoint(Point(float(x), float(y)), str(d["kind"]), str(d.get("source", "manual")))
    except (KeyError, TypeError, ValueError) as e:
        raise CorpusFormatError(f"{where}: malformed landmark ({e})") from e


def document_to_dict(doc: CorpusDocument) -> dict:
    c = doc.corpus
    out = {
        "format_version": doc.format_version,
        "corpus": {
            "id": c.id,
            "name": c.name,
            "baseline_y": None if c.baseline_y is None else _round(c.baseline_y),
            "glyphs": [
                {
                    "id": g.id,
                    "script_id": g.script_id,
                    "label": g.label,
                    "baseline_y": None if g.baseline_y is None else _round(g.baseline_y),
                    "usage_frequency": None if g.usage_frequency is None else _round(g.usage_frequency),
                    "segments": [_seg_to_dict(s) for s in g.segments],
                }
                for g in c.glyphs
            ],
        },
        "trajectories": {gid: _traj_to_dict(t) for gid, t in sorted(doc.trajectories.items())},
        "manual_landmarks": {
            gid: [_landmark_to_dict(lm) for lm in lms]
            for gid, lms in sorted(doc.manual_landmarks.items())
            if lms
        },
        "reconstruction_candidates": {
            gid: [_traj_to_dict(t) for t in ts]
            for gid, ts in sorted(doc.candidates.items())
            if ts
        },
    }
    return out


def document_from_dict(data: dict, flip_y: bool = False) -> CorpusDocument:
    if not isinstance(data, dict):
        raise CorpusFormatError("corpus document must be a JSON object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"unsupported corpus format_version {version!r}")
    try:
        cd = data["corpus"]
        glyphs = []
        for gi, gd in enumerate(cd["glyphs"]):
            where = f"corpus.glyphs[{gi}]"
            segs = tuple(
                _seg_from_dict(sd, f"{where}.segments[{si}]")
                for si, sd in enumerate(gd["segments"])
            )
            if flip_y:
                segs = tuple(
                    SplineSegment.from_arrays(
                        as_point_array(s.control_points) * np.array([1.0, -1.0]), s.knots
                    )
                    for s in segs
                )
            glyphs.append(
                Glyph(
                    id=str(gd["id"]),
                    script_id=str(gd["script_id"]),
                    segments=segs,
                    baseline_y=None if gd.get("baseline_y") is None else float(gd["baseline_y"]),
                    label=gd.get("label"),
                    usage_frequency=None
                    if gd.get("usage_frequency") is None
                    else float(gd["usage_frequency"]),
                )
            )
        corpus = ScriptCorpus(
            id=str(cd["id"]),
            name=str(cd.get("name", cd["id"])),
            glyphs=tuple(glyphs),
            baseline_y=None if cd.get("baseline_y") is None else float(cd["baseline_y"]),
        )
    except (KeyError, TypeError) as e:
        raise CorpusFormatError(f"malformed corpus section ({e})") from e

    known = {g.id for g in corpus.glyphs}

    def check_id(gid: str, what: str):
        if gid not in known:
            raise ReferentialIntegrityError(f"{what} references unknown glyph id {gid!r}")

    trajectories = {}
    for gid, td in data.get("trajectories", {}).items():
        check_id(gid, "trajectory")
        trajectories[gid] = _traj_from_dict(gid, td, f"trajectories[{gid!r}]")
    landmarks = {}
    for gid, lms in data.get("manual_landmarks", {}).items():
        check_id(gid, "manual_landmarks entry")
        landmarks[gid] = [
            _landmark_from_dict(ld, f"manual_landmarks[{gid!r}][{i}]") for i, ld in enumerate(lms)
        ]
    candidates = {}
    for gid, tds in data.get("reconstruction_candidates", {}).items():
        check_id(gid, "reconstruction_candidates entry")
        candidates[gid] = [
            _traj_from_dict(gid, td, f"reconstruction_candidates[{gid!r}][{i}]")
            for i, td in enumerate(tds)
        ]
    return CorpusDocument(
        corpus=corpus,
        trajectories=trajectories,
        manual_landmarks=landmarks,
        candidates=candidates,
        format_version=version,
    )


def dumps_canonical(doc: CorpusDocument) -> str:
    return json.dumps(document_to_dict(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temp file in the same directory, then rename into place."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_corpus(doc: CorpusDocument, path: str) -> None:
    atomic_write_text(path, dumps_canonical(doc))


def load_corpus(path: str, flip_y: bool = False) -> CorpusDocument:
    with open(path, "r", encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise CorpusFormatError(f"{path}: invalid JSON at line {e.lineno} col {e.colno}: {e.msg}") from e
    return document_from_dict(data, flip_y=flip_y)


# -- CSV export -------------------------------------------------------------


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if v != v:  # NaN
            return ""
        return f"{v:.6g}"
    return str(v)


def export_metrics_csv(records: Sequence[MetricRecord], path: str) -> None:
    """One row per glyph; metric columns in alphabetical order after glyph_id."""
    if not records:
        raise InvalidInputError("no metric records to export")
    rows = [record_to_dict(r) for r in records]
    cols = ["glyph_id"] + sorted(k for k in rows[0] if k != "glyph_id")
    _write_csv(path, cols, [[row.get(c) for c in cols] for row in rows])


def export_means_csv(script_means: dict[str, dict], path: str) -> None:
    """Rows = scripts (sorted by id), columns = alphabetical metric names."""
    if not script_means:
        raise InvalidInputError("no script means to export")
    cols = ["script_id"] + sorted(SCALAR_FIELDS)
    rows = []
    for sid in sorted(script_means):
        means = script_means[sid]
        rows.append([sid] + [means.get(f) for f in sorted(SCALAR_FIELDS)])
    _write_csv(path, cols, rows)


def export_similarity_csv(matrix, path: str) -> None:
    """Square CSV with glyph ids as both header row and first column."""
    ids = list(matrix.glyph_ids)
    if not ids:
        raise InvalidInputError("empty similarity matrix")
    rows = []
    for i, gid in enumerate(ids):
        rows.append([gid] + [matrix.values[i, j] for j in range(len(ids))])
    _write_csv(path, ["glyph_id"] + ids, rows)


def export_parallel_coordinates_csv(table: dict, path: str) -> None:
    """Flattened raw+normalized columns per field, one row per script/glyph."""
    fields = list(table["fields"])
    if not table["rows"]:
        raise InvalidInputError("empty parallel-coordinates table")
    cols = ["glyph_id", "script"]
    for f in sorted(fields):
        cols += [f"{f}_norm", f"{f}_raw"]
    rows = []
    for r in table["rows"]:
        row = [r["glyph_id"] or "", r["script"]]
        for f in sorted(fields):
            row += [r["normalized"].get(f), r["raw"].get(f)]
        rows.append(row)
    _write_csv(path, cols, rows)


def export_histograms_csv(histograms: dict, path: str, script_id: str = "") -> None:
    """Long-form histogram table: metric, bin bounds, count."""
    if not histograms:
        raise InvalidInputError("no histograms to export")
    cols = ["script_id", "metric", "bin_lo", "bin_hi", "count"]
    rows = []
    for name in sorted(histograms):
        h = histograms[name]
        for lo, hi, c in zip(h.edges, h.edges[1:], h.counts):
            rows.append([script_id, name, lo, hi, c])
    _write_csv(path, cols, rows)


def _write_csv(path: str, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    atomic_write_text(path, buf.getvalue())
