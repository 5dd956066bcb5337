"""Command-line frontend: exit codes, artifacts, determinism."""

import json
import os

import pytest

from glyphometrics import cli, corpus_io as cio, fixtures


@pytest.fixture()
def corpus_path(tmp_path):
    corpus, trajs = fixtures.script_stage_corpus(1, n_glyphs=4)
    p = tmp_path / "stage1.json"
    cio.save_corpus(cio.CorpusDocument(corpus=corpus, trajectories=dict(trajs)), str(p))
    return str(p)


@pytest.fixture()
def bare_corpus_path(tmp_path):
    """Corpus without stored trajectories, to force auto-reconstruction."""
    corpus, _ = fixtures.script_stage_corpus(1, n_glyphs=3, seed=23)
    p = tmp_path / "bare.json"
    cio.save_corpus(cio.CorpusDocument(corpus=corpus), str(p))
    return str(p)


def test_validate_ok(corpus_path, capsys):
    assert cli.run(["validate", corpus_path]) == 0
    out = capsys.readouterr().out
    assert out.count(": ok") == 4


def test_validate_reports_problems(tmp_path, capsys):
    corpus, trajs = fixtures.script_stage_corpus(1, n_glyphs=2)
    doc = cio.CorpusDocument(corpus=corpus, trajectories=dict(trajs))
    gid = corpus.glyphs[0].id
    # drop one pass so coverage fails
    t = doc.trajectories[gid]
    from dataclasses import replace
    from glyphometrics.glyph_model import PenStroke

    broken = replace(t, pen_strokes=(PenStroke(t.pen_strokes[0].passes[:1]),))
    doc.trajectories[gid] = broken
    p = tmp_path / "bad.json"
    cio.save_corpus(doc, str(p))
    assert cli.run(["validate", str(p)]) == 1


def test_missing_file_exit_one(tmp_path):
    assert cli.run(["validate", str(tmp_path / "none.json")]) == 1


def test_unknown_subcommand_exit_two():
    with pytest.raises(SystemExit) as e:
        cli.run(["frobnicate"])
    assert e.value.code == 2


def test_reconstruct_persists_candidates(bare_corpus_path):
    assert cli.run(["reconstruct", bare_corpus_path, "--top", "3"]) == 0
    doc = cio.load_corpus(bare_corpus_path)
    for g in doc.corpus.glyphs:
        assert g.id in doc.trajectories
        assert 1 <= len(doc.candidates[g.id]) <= 3
        assert doc.candidates[g.id][0] == doc.trajectories[g.id]


def test_reconstruct_bad_weight_exit_two(corpus_path):
    assert cli.run(["reconstruct", corpus_path, "--weights", "gravity=9.8"]) == 2


def test_segment_prints_counts(corpus_path, capsys):
    assert cli.run(["segment", corpus_path]) == 0
    out = capsys.readouterr().out
    assert out.count("pen_strokes=") == 4


def test_metrics_csv(corpus_path, tmp_path, capsys):
    out = tmp_path / "m.csv"
    assert cli.run(["metrics", corpus_path, "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 5  # header + 4 glyphs


def test_metrics_normalize_flag(corpus_path, tmp_path):
    a = tmp_path / "raw.csv"
    b = tmp_path / "norm.csv"
    assert cli.run(["metrics", corpus_path, "--out", str(a)]) == 0
    assert cli.run(["metrics", corpus_path, "--out", str(b), "--normalize"]) == 0
    assert a.read_bytes() != b.read_bytes()


def test_metrics_equals_library_composition(corpus_path, tmp_path):
    """CLI metrics output matches calling the library API directly."""
    from glyphometrics import metrics as mt, segmentation as seg

    out = tmp_path / "m.csv"
    cli.run(["metrics", corpus_path, "--out", str(out)])
    doc = cio.load_corpus(corpus_path)
    records = []
    for g in doc.corpus.glyphs:
        t = doc.trajectories[g.id]
        res = seg.segment(g, t)
        records.append(mt.compute_all(g, t, res, baseline_y=doc.corpus.baseline_y))
    expected = tmp_path / "lib.csv"
    cio.export_metrics_csv(records, str(expected))
    assert out.read_bytes() == expected.read_bytes()


def test_compare_matrix(corpus_path, tmp_path):
    out = tmp_path / "c.csv"
    assert cli.run(["compare", corpus_path, "--out", str(out), "--mode", "trajectory"]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 5


def test_script_stats_artifacts_and_determinism(tmp_path):
    paths = []
    for stage in (1, 2, 3):
        corpus, trajs = fixtures.script_stage_corpus(stage, n_glyphs=4)
        p = tmp_path / f"s{stage}.json"
        cio.save_corpus(cio.CorpusDocument(corpus=corpus, trajectories=dict(trajs)), str(p))
        paths.append(str(p))
    out1 = tmp_path / "out1"
    out2 = tmp_path / "out2"
    assert cli.run(["script-stats", *paths, "--out-dir", str(out1)]) == 0
    assert cli.run(["script-stats", *paths, "--out-dir", str(out2)]) == 0

    expected = {
        "parallel_coordinates.csv",
        "means.csv",
        "entropy_histogram.csv",
        "stroke_counts.csv",
        "directions.json",
    }
    names = {p.name for p in out1.iterdir()}
    assert expected <= names
    assert {f"tamil{s}_histograms.csv" for s in (1, 2, 3)} <= names
    assert {f"tamil{s}_similarity.csv" for s in (1, 2, 3)} <= names

    for name in sorted(names):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    # three rows in the parallel-coordinates means table
    pc = (out1 / "parallel_coordinates.csv").read_text().splitlines()
    assert len(pc) == 4

    # direction summaries parse and cover all three scripts
    ds = json.loads((out1 / "directions.json").read_text())
    assert set(ds) == {"tamil1", "tamil2", "tamil3"}


def test_thread_env_var_does_not_change_output(corpus_path, tmp_path, monkeypatch):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    cli.run(["metrics", corpus_path, "--out", str(a)])
    monkeypatch.setenv("GLYPHOMETRICS_THREADS", "4")
    cli.run(["metrics", corpus_path, "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
