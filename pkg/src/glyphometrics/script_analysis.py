"""Script-level aggregation: means, distributions, bigram stroke model,
distinctivity self-similarity and plot-ready export tables."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateGlyphError, InvalidInputError
from .glyph_model import Glyph, ScriptCorpus, Trajectory
from .metrics import (
    SCALAR_FIELDS,
    MetricRecord,
    dtw,
    record_to_dict,
    _shape_sequence,
)
from .segmentation import SegmentationResult

__all__ = [
    "Histogram",
    "ScriptMetrics",
    "BigramModel",
    "SimilarityMatrix",
    "aggregate",
    "build_bigram_model",
    "similarity_matrix",
    "export_parallel_coordinates",
    "direction_summary",
]

_MODAL_ORDER = ("N", "NE", "E", "SE", "S", "SW", "W", "NW")


@dataclass(frozen=True)
class Histogram:
    metric: str
    edges: tuple[float, ...]
    counts: tuple[int, ...]


@dataclass(frozen=True)
class ScriptMetrics:
    script_id: str
    per_glyph: dict  # glyph_id -> MetricRecord
    means: dict  # metric name -> float | None
    weighted_means: Optional[dict]
    histograms: dict  # metric name -> Histogram


@dataclass(frozen=True)
class BigramModel:
    unigram: dict  # code -> probability
    bigram: dict  # (code, code) -> conditional probability p(second | first)
    smoothing: str  # none | add_one
    unigram_entropy_nats: float
    conditional_entropy_nats: float


@dataclass(frozen=True)
class SimilarityMatrix:
    glyph_ids: tuple[str, ...]
    values: np.ndarray  # square; NaN rows/columns for degenerate glyphs
    failed: tuple[str, ...] = ()


def _fd_bins(values: np.ndarray) -> np.ndarray:
    """Freedman-Diaconis bin edges with a minimum of 5 bins."""
    lo, hi = float(values.min()), float(values.max())
    if hi <= lo:
        return np.linspace(lo - 0.5, hi + 0.5, 6)
    q75, q25 = np.percentile(values, [75, 25])
    iqr = q75 - q25
    width = 2.0 * iqr / len(values) ** (1.0 / 3.0)
    n = max(5, int(math.ceil((hi - lo) / width))) if width > 0 else 5
    return np.linspace(lo, hi, min(n, 200) + 1)


def aggregate(corpus: ScriptCorpus, records: Sequence[MetricRecord], weighting: str = "uniform") -> ScriptMetrics:
    """Means (optionally frequency-weighted) and histograms over non-null values."""
    if not corpus.glyphs:
        raise InvalidInputError("empty corpus")
    if weighting not in ("uniform", "frequency"):
        raise InvalidInputError(f"unknown weighting {weighting!r}")
    by_id = {r.glyph_id: r for r in records}
    missing = [g.id for g in corpus.glyphs if g.id not in by_id]
    if missing:
        raise InvalidInputError(f"missing metric records for glyphs: {missing}")

    flat = {g.id: record_to_dict(by_id[g.id]) for g in corpus.glyphs}
    freqs = {g.id: (g.usage_frequency if g.usage_frequency is not None else 1.0) for g in corpus.glyphs}

    def mean_of(fld: str, weighted: bool):
        pairs = [
            (flat[gid][fld], freqs[gid] if weighted else 1.0)
            for gid in flat
            if flat[gid][fld] is not None
        ]
        if not pairs:
            return None
        vals, ws = zip(*pairs)
        return float(np.average(vals, weights=ws))

    means = {f: mean_of(f, False) for f in SCALAR_FIELDS}
    weighted_means = {f: mean_of(f, True) for f in SCALAR_FIELDS} if weighting == "frequency" else None

    histograms = {}
    for f in SCALAR_FIELDS:
        vals = np.array([flat[gid][f] for gid in flat if flat[gid][f] is not None], dtype=float)
        if len(vals) == 0:
            continue
        edges = _fd_bins(vals)
        counts, _ = np.histogram(vals, bins=edges)
        histograms[f] = Histogram(f, tuple(float(e) for e in edges), tuple(int(c) for c in counts))

    return ScriptMetrics(
        script_id=corpus.id,
        per_glyph=dict(by_id),
        means=means,
        weighted_means=weighted_means,
        histograms=histograms,
    )


# -- bigram stroke model ----------------------------------------------------


def build_bigram_model(sequences: Sequence[Sequence[str]], smoothing: str = "none") -> BigramModel:
    """Unigram/bigram model over per-glyph direction-code sequences.

    Sequences are never concatenated across glyphs.
    """
    if smoothing not in ("none", "add_one"):
        raise InvalidInputError(f"unknown smoothing {smoothing!r}")
    seqs = [list(s) for s in sequences if len(s) > 0]
    if not seqs:
        raise InvalidInputError("no non-empty stroke sequences")

    uni = Counter(c for s in seqs for c in s)
    total = sum(uni.values())
    unigram = {c: uni[c] / total for c in sorted(uni)}
    unigram_entropy = -sum(p * math.log(p) for p in unigram.values())

    pair_counts = Counter((a, b) for s in seqs for a, b in zip(s, s[1:]))
    first_counts = Counter(a for a, _ in pair_counts.elements())

    bigram: dict[tuple[str, str], float] = {}
    if smoothing == "add_one":
        for a in _MODAL_ORDER:
            denom = first_counts.get(a, 0) + len(_MODAL_ORDER)
            for b in _MODAL_ORDER:
                bigram[(a, b)] = (pair_counts.get((a, b), 0) + 1) / denom
    else:
        for (a, b), n in sorted(pair_counts.items()):
            bigram[(a, b)] = n / first_counts[a]

    total_pairs = sum(pair_counts.values())
    cond_entropy = 0.0
    if total_pairs:
        for a, na in first_counts.items():
            pa = na / total_pairs
            for b in _MODAL_ORDER:
                n_ab = pair_counts.get((a, b), 0)
                if n_ab:
                    p_ba = n_ab / na
                    cond_entropy -= pa * p_ba * math.log(p_ba)

    return BigramModel(
        unigram=unigram,
        bigram=bigram,
        smoothing=smoothing,
        unigram_entropy_nats=unigram_entropy,
        conditional_entropy_nats=cond_entropy,
    )


# -- distinctivity matrix ---------------------------------------------------


def similarity_matrix(
    items: Sequence[tuple[Glyph, Optional[Trajectory]]],
    mode: str = "trajectory",
    resample: int = 64,
) -> SimilarityMatrix:
    """Pairwise distinctivity; upper triangle computed and mirrored."""
    if len(items) < 2:
        raise InvalidInputError("need at least 2 glyphs")
    ids = tuple(g.id for g, _ in items)
    seqs: list[Optional[np.ndarray]] = []
    failed = []
    for g, t in items:
        try:
            seqs.append(_shape_sequence(g, t, mode, resample))
        except DegenerateGlyphError:
            seqs.append(None)
            failed.append(g.id)
    n = len(items)
    values = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            if seqs[i] is None or seqs[j] is None:
                v = np.nan
            else:
                cost, path = dtw(seqs[i], seqs[j])
                v = cost / len(path)
            values[i, j] = values[j, i] = v
        if seqs[i] is None:
            values[i, i] = np.nan
    return SimilarityMatrix(glyph_ids=ids, values=values, failed=tuple(failed))


# -- plot-ready exports -----------------------------------------------------


def export_parallel_coordinates(
    script_metrics: Sequence[ScriptMetrics],
    fields: Sequence[str],
    include_glyphs: bool = False,
) -> dict:
    """Min-max normalized table of script means (plus optional per-glyph rows).

    A field with zero range across all rows normalizes to 0.5; fields that are
    null everywhere are dropped with a warning.
    """
    if not script_metrics:
        raise InvalidInputError("no scripts to export")
    if not fields:
        raise InvalidInputError("no fields requested")

    rows = []
    for sm in script_metrics:
        rows.append({"script": sm.script_id, "glyph_id": None, "values": dict(sm.means)})
        if include_glyphs:
            for gid, rec in sorted(sm.per_glyph.items()):
                flat = record_to_dict(rec)
                rows.append({"script": sm.script_id, "glyph_id": gid, "values": flat})

    warnings = []
    kept_fields = []
    bounds = {}
    for f in fields:
        vals = [r["values"].get(f) for r in rows if r["values"].get(f) is not None]
        if not vals:
            warnings.append(f"field {f!r} has no non-null values; dropped")
            continue
        kept_fields.append(f)
        bounds[f] = (float(min(vals)), float(max(vals)))

    out_rows = []
    for r in rows:
        raw = {f: r["values"].get(f) for f in kept_fields}
        norm = {}
        for f in kept_fields:
            v = raw[f]
            if v is None:
                norm[f] = None
                continue
            lo, hi = bounds[f]
            norm[f] = 0.5 if hi <= lo else (v - lo) / (hi - lo)
        out_rows.append({"script": r["script"], "glyph_id": r["glyph_id"], "raw": raw, "normalized": norm})

    return {"fields": kept_fields, "bounds": bounds, "rows": out_rows, "warnings": warnings}


def direction_summary(segmentations: Sequence[SegmentationResult]) -> dict:
    """Distributions of per-glyph major and initial pen directions."""
    if not segmentations:
        raise InvalidInputError("no segmentations")
    from .metrics import angle_metrics
    from .segmentation import quantize_angle

    major = Counter()
    initial = Counter()
    skipped = []
    for res in segmentations:
        if not res.visible_strokes:
            skipped.append(res.glyph.id)
            continue
        am = angle_metrics(res)
        major[quantize_angle(am.major_angle_deg)] += 1
        initial[quantize_angle(am.initial_angle_deg)] += 1

    def modal(counter: Counter) -> Optional[str]:
        if not counter:
            return None
        best = max(counter.values())
        for code in _MODAL_ORDER:
            if counter.get(code) == best:
                return code
        return None

    return {
        "major": {c: major.get(c, 0) for c in _MODAL_ORDER},
        "initial": {c: initial.get(c, 0) for c in _MODAL_ORDER},
        "modal_major": modal(major),
        "modal_initial": modal(initial),
        "skipped": skipped,
    }
