"""Batch command-line frontend for the analysis pipeline.

Subcommands: validate, reconstruct, segment, metrics, compare, script-stats.
Exit codes: 0 success, 1 domain error, 2 usage error. Outputs are
deterministic for fixed inputs and flags; files are written atomically.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

from . import corpus_io, glyph_model, metrics, reconstruction, script_analysis, segmentation
from .errors import GlyphometricsError

__all__ = ["main", "run"]


def _n_threads() -> int:
    raw = os.environ.get("GLYPHOMETRICS_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map(fn, items):
    n = _n_threads()
    items = list(items)
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))


def _parse_weights(pairs) -> reconstruction.ReconstructionConfig:
    cfg = reconstruction.ReconstructionConfig()
    if not pairs:
        return cfg
    allowed = {
        "pen_up": "pen_up_cost",
        "turn": "turn_cost_per_degree",
        "retrace": "retrace_cost_per_length",
        "start_prior": "start_prior_cost",
    }
    updates = {}
    for pair in pairs:
        if "=" not in pair:
            raise argparse.ArgumentTypeError(f"weight must be name=value, got {pair!r}")
        name, _, value = pair.partition("=")
        if name not in allowed:
            raise argparse.ArgumentTypeError(
                f"unknown weight {name!r} (expected one of {sorted(allowed)})"
            )
        updates[allowed[name]] = float(value)
    return replace(cfg, **updates)


def _ensure_trajectory(doc: corpus_io.CorpusDocument, glyph, cfg=None):
    """Stored trajectory if present, else the deterministic best reconstruction."""
    t = doc.trajectories.get(glyph.id)
    if t is not None:
        return t
    cands = reconstruction.reconstruct(glyph, cfg or reconstruction.ReconstructionConfig())
    return cands[0].trajectory


def _seg_config(args) -> segmentation.SegmentationConfig:
    kw = {}
    if getattr(args, "sharp_deg", None) is not None:
        kw["sharp_junction_threshold_deg"] = args.sharp_deg
    if getattr(args, "prominence", None) is not None:
        kw["curvature_prominence"] = args.prominence
    return segmentation.SegmentationConfig(**kw)


def _segment_glyph(doc, glyph, args, cfg=None):
    t = _ensure_trajectory(doc, glyph, cfg)
    res = segmentation.segment(glyph, t, _seg_config(args))
    edits = doc.manual_landmarks.get(glyph.id)
    if edits:
        res = segmentation.apply_landmark_edits(res, edits)
    return t, res


# -- subcommands ------------------------------------------------------------


def _cmd_validate(args) -> int:
    doc = corpus_io.load_corpus(args.corpus, flip_y=args.flip_y)
    failures = 0
    for g in doc.corpus.glyphs:
        problems = glyph_model.validate(g)
        t = doc.trajectories.get(g.id)
        if t is not None:
            problems += glyph_model.validate_trajectory(g, t)
        if problems:
            failures += 1
            for p in problems:
                print(f"{g.id}: {p}", file=sys.stderr)
        else:
            print(f"{g.id}: ok")
    return 1 if failures else 0


def _cmd_reconstruct(args) -> int:
    doc = corpus_io.load_corpus(args.corpus, flip_y=args.flip_y)
    cfg = replace(_parse_weights(args.weights), max_candidates=args.top)
    failures = []

    def work(g):
        try:
            return g.id, reconstruction.reconstruct(g, cfg)
        except GlyphometricsError as e:
            return g.id, e

    for gid, result in _map(work, doc.corpus.glyphs):
        if isinstance(result, Exception):
            failures.append(gid)
            print(f"{gid}: reconstruction failed: {result}", file=sys.stderr)
            continue
        doc.candidates[gid] = [c.trajectory for c in result]
        doc.trajectories[gid] = result[0].trajectory
        print(f"{gid}: {len(result)} candidates, best score {result[0].score:.6g}")
    corpus_io.save_corpus(doc, args.out or args.corpus)
    return 1 if failures else 0


def _cmd_segment(args) -> int:
    doc = corpus_io.load_corpus(args.corpus, flip_y=args.flip_y)
    failures = []
    for g in doc.corpus.glyphs:
        try:
            _, res = _segment_glyph(doc, g, args)
        except GlyphometricsError as e:
            failures.append(g.id)
            print(f"{g.id}: segmentation failed: {e}", file=sys.stderr)
            continue
        c = metrics.stroke_counts(res)
        print(
            f"{g.id}: pen_strokes={c.pen_strokes} disjointed={c.disjointed} "
            f"primitive={c.primitive} retraces={c.retraces} landmarks={len(res.landmarks)} "
            f"inventory={res.stroke_inventory_key}"
        )
    return 1 if failures else 0


def _cmd_metrics(args) -> int:
    doc = corpus_io.load_corpus(args.corpus, flip_y=args.flip_y)
    failures = []
    records = []

    def work(g):
        try:
            if args.normalize:
                g = glyph_model.normalize(g)
            t = _ensure_trajectory(doc, g)
            res = segmentation.segment(g, t)
            edits = doc.manual_landmarks.get(g.id)
            if edits:
                res = segmentation.apply_landmark_edits(res, edits)
            baseline = g.baseline_y if g.baseline_y is not None else doc.corpus.baseline_y
            if args.normalize:
                baseline = None  # normalization rescales away the shared baseline
            return g.id, metrics.compute_all(g, t, res, baseline_y=baseline)
        except GlyphometricsError as e:
            return g.id, e

    for gid, result in _map(work, doc.corpus.glyphs):
        if isinstance(result, Exception):
            failures.append(gid)
            print(f"{gid}: metrics failed: {result}", file=sys.stderr)
        else:
            records.append(result)
    if records:
        corpus_io.export_metrics_csv(records, args.out)
        print(f"wrote {args.out}: {len(records)} glyphs")
    return 1 if failures else 0


def _cmd_compare(args) -> int:
    doc = corpus_io.load_corpus(args.corpus, flip_y=args.flip_y)
    items = []
    for g in doc.corpus.glyphs:
        t = _ensure_trajectory(doc, g) if args.mode == "trajectory" else doc.trajectories.get(g.id)
        items.append((g, t))
    matrix = script_analysis.similarity_matrix(items, mode=args.mode)
    corpus_io.export_similarity_csv(matrix, args.out)
    print(f"wrote {args.out}: {len(matrix.glyph_ids)}x{len(matrix.glyph_ids)}")
    if matrix.failed:
        for gid in matrix.failed:
            print(f"{gid}: degenerate glyph, similarity undefined", file=sys.stderr)
        return 1
    return 0


def _cmd_script_stats(args) -> int:
    os.makedirs(args.out_dir, exist_ok=True)
    failures = []
    per_script = []
    means_by_script = {}
    stroke_rows = {}
    directions = {}
    entropy_hists = {}

    for path in args.corpora:
        doc = corpus_io.load_corpus(path, flip_y=args.flip_y)
        corpus = doc.corpus
        records, seg_results, items = [], [], []
        for g in corpus.glyphs:
            try:
                t, res = _segment_glyph(doc, g, args)
            except GlyphometricsError as e:
                failures.append(g.id)
                print(f"{g.id}: {e}", file=sys.stderr)
                continue
            baseline = g.baseline_y if g.baseline_y is not None else corpus.baseline_y
            records.append(metrics.compute_all(g, t, res, baseline_y=baseline))
            seg_results.append(res)
            items.append((g, t))
        sm = script_analysis.aggregate(corpus, records, weighting="frequency")
        per_script.append(sm)
        means_by_script[corpus.id] = sm.means
        corpus_io.export_histograms_csv(
            sm.histograms, os.path.join(args.out_dir, f"{corpus.id}_histograms.csv"), corpus.id
        )
        if "entropy_nats" in sm.histograms:
            entropy_hists[corpus.id] = sm.histograms["entropy_nats"]
        flat = [corpus_io.record_to_dict(r) for r in records]
        count_fields = [
            "counts_primitive",
            "counts_pen_strokes",
            "counts_disjointed",
            "counts_retraces",
            "counts_upstrokes",
            "counts_downstrokes",
        ]
        stroke_rows[corpus.id] = {
            f: float(sum(row[f] for row in flat)) / len(flat) for f in count_fields
        }
        if len(items) >= 2:
            matrix = script_analysis.similarity_matrix(items)
            corpus_io.export_similarity_csv(
                matrix, os.path.join(args.out_dir, f"{corpus.id}_similarity.csv")
            )
        directions[corpus.id] = script_analysis.direction_summary(seg_results)

    fields = sorted(metrics.SCALAR_FIELDS)
    table = script_analysis.export_parallel_coordinates(per_script, fields)
    corpus_io.export_parallel_coordinates_csv(
        table, os.path.join(args.out_dir, "parallel_coordinates.csv")
    )
    corpus_io.export_means_csv(means_by_script, os.path.join(args.out_dir, "means.csv"))
    corpus_io.export_histograms_csv(
        {f"{sid}": h for sid, h in sorted(entropy_hists.items())},
        os.path.join(args.out_dir, "entropy_histogram.csv"),
    )
    corpus_io._write_csv(
        os.path.join(args.out_dir, "stroke_counts.csv"),
        ["script_id"] + sorted(next(iter(stroke_rows.values())).keys()),
        [
            [sid] + [stroke_rows[sid][f] for f in sorted(stroke_rows[sid])]
            for sid in sorted(stroke_rows)
        ],
    )
    corpus_io.atomic_write_text(
        os.path.join(args.out_dir, "directions.json"),
        json.dumps(directions, sort_keys=True, indent=2) + "\n",
    )
    print(f"wrote {args.out_dir}: {len(per_script)} scripts")
    return 1 if failures else 0


# -- argument parsing -------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="glyphometrics", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, fn, **kwargs):
        p = sub.add_parser(name, **kwargs)
        p.set_defaults(fn=fn)
        p.add_argument("--flip-y", action="store_true", help="input uses screen (y-down) coordinates")
        return p

    p = add("validate", _cmd_validate, help="check corpus and trajectory invariants")
    p.add_argument("corpus")

    p = add("reconstruct", _cmd_reconstruct, help="infer writing order candidates")
    p.add_argument("corpus")
    p.add_argument("--top", type=int, default=5, help="candidates kept per glyph")
    p.add_argument("--weights", nargs="*", metavar="NAME=VALUE",
                   help="cost weights: pen_up, turn, retrace, start_prior")
    p.add_argument("--out", help="output corpus path (default: in place)")

    p = add("segment", _cmd_segment, help="segment glyphs into strokes")
    p.add_argument("corpus")
    p.add_argument("--sharp-deg", type=float, help="sharp junction threshold in degrees")
    p.add_argument("--prominence", type=float, help="curvature peak prominence")

    p = add("metrics", _cmd_metrics, help="compute the per-glyph metric table")
    p.add_argument("corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--normalize", action="store_true", help="scale glyphs to unit bbox diagonal first")

    p = add("compare", _cmd_compare, help="pairwise distinctivity matrix")
    p.add_argument("corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--mode", choices=["trajectory", "static"], default="trajectory")

    p = add("script-stats", _cmd_script_stats, help="script-level artifact set")
    p.add_argument("corpora", nargs="+")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--sharp-deg", type=float)
    p.add_argument("--prominence", type=float)

    return parser


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except argparse.ArgumentTypeError as e:
        print(str(e), file=sys.stderr)
        return 2
    try:
        return args.fn(args)
    except argparse.ArgumentTypeError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return 2
    except GlyphometricsError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
