"""Per-glyph metrics against closed-form shapes and brute-force oracles."""

import functools
import math
import random

import numpy as np
import pytest

from glyphometrics import fixtures, glyph_model as gm, metrics as mt, segmentation as seg


def analyzed(g, t, baseline_y=None):
    res = seg.segment(g, t)
    return g, t, res, mt.compute_all(g, t, res, baseline_y=baseline_y)


# -- exhaustive DTW oracle --------------------------------------------------


def dtw_oracle(a, b):
    """Minimal-cost warping by memoized recursion over all monotone alignments."""
    a = np.atleast_2d(np.asarray(a, dtype=float).T).T
    b = np.atleast_2d(np.asarray(b, dtype=float).T).T

    @functools.lru_cache(maxsize=None)
    def go(i, j):
        d = float(np.linalg.norm(a[i] - b[j]))
        if i == 0 and j == 0:
            return d
        options = []
        if i > 0 and j > 0:
            options.append(go(i - 1, j - 1))
        if i > 0:
            options.append(go(i - 1, j))
        if j > 0:
            options.append(go(i, j - 1))
        return d + min(options)

    return go(len(a) - 1, len(b) - 1)


class TestDtw:
    def test_toy_sequences_cost_two(self):
        cost, path = mt.dtw([1.0, 2.0, 3.0], [2.0, 3.0, 4.0])
        assert cost == pytest.approx(2.0)
        assert path[0] == (0, 0) and path[-1] == (2, 2)

    def test_identity_is_zero(self):
        a = np.random.default_rng(3).uniform(size=(20, 2))
        cost, _ = mt.dtw(a, a)
        assert cost == pytest.approx(0.0, abs=1e-12)

    def test_matches_exhaustive_oracle(self, nprng):
        for _ in range(30):
            n, m = int(nprng.integers(2, 9)), int(nprng.integers(2, 9))
            a = nprng.uniform(-2, 2, size=(n, 2))
            b = nprng.uniform(-2, 2, size=(m, 2))
            cost, _ = mt.dtw(a, b)
            assert cost == pytest.approx(dtw_oracle(a, b), rel=1e-9)

    def test_symmetry_nonnegativity_random_pairs(self, nprng):
        for _ in range(100):
            a = nprng.uniform(-1, 1, size=(int(nprng.integers(2, 30)), 2))
            b = nprng.uniform(-1, 1, size=(int(nprng.integers(2, 30)), 2))
            ab, _ = mt.dtw(a, b)
            ba, _ = mt.dtw(b, a)
            assert ab >= 0
            assert ab == pytest.approx(ba, rel=1e-9, abs=1e-12)

    def test_path_monotone(self):
        _, path = mt.dtw(np.random.default_rng(0).uniform(size=(10, 2)),
                         np.random.default_rng(1).uniform(size=(14, 2)))
        for (i0, j0), (i1, j1) in zip(path, path[1:]):
            assert (i1 - i0, j1 - j0) in {(1, 1), (1, 0), (0, 1)}


class TestDistinctivity:
    def test_self_distance_zero(self, worked):
        g, t = worked
        assert mt.distinctivity((g, t), (g, t)) == pytest.approx(0.0, abs=1e-9)

    def test_symmetric(self, worked, s_shape):
        d1 = mt.distinctivity(worked, s_shape)
        d2 = mt.distinctivity(s_shape, worked)
        assert d1 == pytest.approx(d2, rel=1e-9)
        assert d1 > 0

    def test_scale_invariant(self, s_shape, worked):
        g, t = worked
        big = gm.transform_glyph(g, scale=25.0)
        assert mt.distinctivity(s_shape, (big, t)) == pytest.approx(
            mt.distinctivity(s_shape, worked), rel=1e-6
        )

    def test_static_mode_ignores_trajectory(self, worked):
        g, t = worked
        assert mt.distinctivity((g, None), (g, None), mode="static") == pytest.approx(0.0, abs=1e-9)


class TestClosedFormShapes:
    def test_square_metrics(self, square):
        g, t, res, rec = analyzed(*square)
        d = mt.record_to_dict(rec)
        assert d["length"] == pytest.approx(4.0, rel=1e-6)
        assert d["divergence"] == pytest.approx(0.0, abs=1e-9)
        assert d["size"] == pytest.approx(1.0, rel=1e-6)
        assert d["lb_index"] == pytest.approx(1.0, rel=1e-6)
        assert d["rectangularity"] == pytest.approx(1.0, rel=1e-3)
        assert d["circularity"] == pytest.approx(2.0 / math.pi, rel=1e-3)
        assert d["compactness"] == pytest.approx(4.0, rel=1e-6)
        assert d["crossings"] == 0

    def test_circle_metrics(self, circle):
        g, t, res, rec = analyzed(*circle)
        d = mt.record_to_dict(rec)
        assert d["avg_curvature"] == pytest.approx(1.0, rel=0.01)
        assert d["circularity"] == pytest.approx(1.0, rel=0.01)
        assert d["length"] == pytest.approx(2 * math.pi, rel=1e-3)

    def test_line_metrics(self):
        g, t = fixtures.line_glyph((0, 0), (3, 4))
        _, _, res, rec = analyzed(g, t)
        d = mt.record_to_dict(rec)
        assert d["length"] == pytest.approx(5.0, rel=1e-6)
        assert d["divergence"] == pytest.approx(5.0, rel=1e-6)
        assert d["avg_curvature"] == pytest.approx(0.0, abs=1e-6)


class TestWorkedCharacterMetrics:
    def test_disfluency_and_counts(self, worked):
        g, t, res, rec = analyzed(*worked)
        d = mt.record_to_dict(rec)
        assert d["disfluency"] == 6
        assert d["counts_primitive"] == 8
        assert d["counts_pen_strokes"] == 1
        assert d["counts_disjointed"] == 3
        assert d["counts_retraces"] == 1

    def test_up_down_partition(self, worked):
        g, t, res, rec = analyzed(*worked)
        d = mt.record_to_dict(rec)
        assert d["counts_upstrokes"] + d["counts_downstrokes"] == d["counts_primitive"]


class TestEntropy:
    def test_seven_distinct_codes(self):
        assert mt.entropy_of_codes(["N", "E", "W", "S", "NW", "SE", "SW"]) == pytest.approx(
            math.log(7), abs=1e-9
        )

    @pytest.mark.parametrize("k", range(1, 9))
    def test_uniform_k_codes(self, k):
        codes = list(gm.DIRECTION_CODES[:k])
        assert mt.entropy_of_codes(codes) == pytest.approx(math.log(k), abs=1e-9)

    def test_bounds(self, nprng):
        for _ in range(50):
            n = int(nprng.integers(1, 40))
            codes = [gm.DIRECTION_CODES[i] for i in nprng.integers(0, 8, size=n)]
            h = mt.entropy_of_codes(codes)
            assert -1e-12 <= h <= math.log(8) + 1e-12

    def test_repetition_lowers_entropy(self):
        assert mt.entropy_of_codes(["N", "N", "N", "E"]) < mt.entropy_of_codes(
            ["N", "N", "E", "E"]
        )


class TestAscendancyDescendance:
    def test_baseline_below_everything(self, square):
        g, t, res, rec = analyzed(*square, baseline_y=-5.0)
        d = mt.record_to_dict(rec)
        assert d["ascendancy_pct"] == pytest.approx(100.0, rel=1e-6)
        assert d["descendance_pct"] == pytest.approx(0.0, abs=1e-9)

    def test_split_halves(self):
        g, t = fixtures.line_glyph((0.0, -1.0), (0.0, 1.0))
        _, _, res, rec = analyzed(g, t, baseline_y=0.0)
        d = mt.record_to_dict(rec)
        assert d["ascendancy_pct"] == pytest.approx(50.0, rel=1e-6)
        assert d["descendance_pct"] == pytest.approx(50.0, rel=1e-6)

    def test_null_without_baseline(self, square):
        g, t, res, rec = analyzed(*square)
        d = mt.record_to_dict(rec)
        assert d["ascendancy_pct"] is None
        assert "ascendancy_pct" in rec.reasons


SCALE_DEGREES = {
    "length": 1,
    "divergence": 1,
    "size": 2,
    "avg_curvature": -1,
    "compactness": -1,
    "pen_drag_distance": 1,
}

INVARIANT_FIELDS = (
    "lb_index",
    "openness",
    "circularity",
    "rectangularity",
    "entropy_nats",
    "changeability",
    "counts_primitive",
    "counts_pen_strokes",
    "counts_disjointed",
    "counts_upstrokes",
    "counts_downstrokes",
    "angles_major_angle_deg",
    "angles_initial_angle_deg",
)


@pytest.fixture(scope="module")
def suite():
    rng = random.Random(99)
    out = []
    for i in range(50):
        g, t = fixtures.random_smooth_glyph(
            rng, f"sl{i}", n_segments=rng.randint(2, 5),
            curviness=rng.uniform(0.05, 0.25), pen_up_prob=0.2,
        )
        out.append((g, t))
    return out


class TestScaleLaws:
    @pytest.mark.parametrize("s", [0.5, 2.0, 10.0])
    def test_homogeneity(self, suite, s):
        for g, t in suite:
            base = mt.record_to_dict(analyzed(g, t)[3])
            scaled_g = gm.transform_glyph(g, scale=s)
            scaled = mt.record_to_dict(analyzed(scaled_g, t)[3])
            for name, deg in SCALE_DEGREES.items():
                if base[name] is None:
                    assert scaled[name] is None
                    continue
                expected = base[name] * s**deg
                assert scaled[name] == pytest.approx(expected, rel=1e-6, abs=1e-9), name
            for name in INVARIANT_FIELDS:
                if base[name] is None:
                    continue
                assert scaled[name] == pytest.approx(base[name], rel=1e-6, abs=1e-9), name


class TestStrokeStats:
    def test_avg_stroke_length(self, square):
        g, t, res, rec = analyzed(*square)
        d = mt.record_to_dict(rec)
        assert d["avg_stroke_length"] == pytest.approx(1.0, rel=1e-6)

    def test_changeability_single_inventory(self, square):
        g, t, res, rec = analyzed(*square)
        # one glyph, one inventory: changeability defined but trivially 0
        assert mt.record_to_dict(rec)["changeability"] is not None


class TestCognitiveCounts:
    def test_s_landmark_vs_rdp_agreement(self, s_shape):
        g, t, res, rec = analyzed(*s_shape)
        d = mt.record_to_dict(rec)
        # the two demand estimates agree within one point on a smooth S
        assert abs(d["landmark_count"] - d["rdp_point_count"]) <= 1

    def test_landmark_count_includes_endpoints(self, s_shape):
        g, t, res, rec = analyzed(*s_shape)
        d = mt.record_to_dict(rec)
        assert d["landmark_count"] == len(res.landmarks) + 2


class TestAngleMetrics:
    def test_rectangle_major_angle_is_longest_side(self):
        from glyphometrics.geometry import SplineSegment
        from glyphometrics.glyph_model import DirectedPass, Glyph, PenStroke, Trajectory

        corners = [(0, 1), (3, 1), (3, 0), (0, 0), (0, 1)]
        segs = tuple(SplineSegment.line(a, b) for a, b in zip(corners, corners[1:]))
        g = Glyph("rect", "fixture", segs)
        t = Trajectory("rect", (PenStroke(tuple(DirectedPass(i) for i in range(4))),))
        _, _, res, rec = analyzed(g, t)
        d = mt.record_to_dict(rec)
        assert d["angles_major_angle_deg"] == pytest.approx(0.0, abs=1e-6)
        assert d["angles_initial_angle_deg"] == pytest.approx(0.0, abs=1e-6)

    def test_divergence_angle_of_line(self):
        g, t = fixtures.line_glyph((0, 0), (0, -2))
        _, _, res, rec = analyzed(g, t)
        assert mt.record_to_dict(rec)["angles_divergence_angle_deg"] == pytest.approx(270.0)


def test_record_to_dict_flattens_all_scalar_fields(worked):
    g, t, res, rec = analyzed(*worked)
    d = mt.record_to_dict(rec)
    for f in mt.SCALAR_FIELDS:
        assert f in d
