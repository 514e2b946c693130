import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resolving_power.binormal import binormal_signal_curve
from resolving_power.scores import LabeledScores, auprc, auroc
from resolving_power.signal import (ExtrapolationError, ImprovementStrategy,
                                    PerfectClassifierError, SignalCurve, empirical_signal_curve,
                                    map_to_quality, min_out_of_order_gap, pair_resolving_shift,
                                    shifted_scores, smallest_gaps)

from oracles import brute_gaps, pair_count_auroc, random_instance

EXAMPLE = LabeledScores.from_classes([0.3, 0.8], [0.5, 0.1])


def test_min_gap_examples():
    assert min_out_of_order_gap(EXAMPLE) == pytest.approx(0.2)
    d = LabeledScores.from_classes([0.4, 0.45], [0.5, 0.6])
    assert min_out_of_order_gap(d) == pytest.approx(0.05)
    with pytest.raises(PerfectClassifierError):
        min_out_of_order_gap(LabeledScores.from_classes([0.9], [0.1]))


def test_smallest_gaps_match_brute_force():
    rng = np.random.default_rng(1)
    for _ in range(100):
        a = rng.integers(0, 40, rng.integers(1, 60)) / 4
        b = rng.integers(0, 40, rng.integers(1, 60)) / 4
        want = brute_gaps(a, b)
        k = int(rng.integers(1, 80))
        np.testing.assert_allclose(smallest_gaps(a, b, k), want[:k], rtol=0, atol=1e-12)


def test_shifted_scores_examples():
    d = shifted_scores(EXAMPLE, 0.0)
    assert np.array_equal(d.scores, EXAMPLE.scores) and np.array_equal(d.labels, EXAMPLE.labels)
    up = shifted_scores(EXAMPLE, pair_resolving_shift(EXAMPLE, 1))
    assert auroc(EXAMPLE) == 0.75 and auroc(up) == 1.0
    assert np.array_equal(up.negatives, EXAMPLE.negatives)


def test_shift_epsilon_rule():
    d = LabeledScores.from_classes([0.0, 0.1], [0.3, 0.35])
    # gaps 0.2, 0.25, 0.3, 0.35: midpoint between the first two
    assert pair_resolving_shift(d, 1) == pytest.approx(0.225)
    # last gap: add half the smallest gap
    assert pair_resolving_shift(d, 4) == pytest.approx(0.35 + 0.1)
    with pytest.raises(PerfectClassifierError):
        pair_resolving_shift(d, 5)
    # the downward direction uses in-order gaps
    with pytest.raises(PerfectClassifierError):
        pair_resolving_shift(d, 1, direction=-1)


@pytest.mark.parametrize("seed", range(20))
def test_shift_resolves_exactly_k_pairs(seed):
    rng = np.random.default_rng(seed)
    s, l = random_instance(rng, 100, n_min=10)
    d = LabeledScores(s, l)
    n_ooo = len(brute_gaps(d.positives, d.negatives))
    base = pair_count_auroc(d.positives, d.negatives)
    total = d.n_pos * d.n_neg
    for k in range(1, min(5, n_ooo) + 1):
        moved = shifted_scores(d, pair_resolving_shift(d, k))
        assert auroc(moved) - base == pytest.approx(k / total, abs=1e-12)
    n_in = len(brute_gaps(d.negatives, d.positives))
    for k in range(1, min(5, n_in) + 1):
        moved = shifted_scores(d, -pair_resolving_shift(d, k, direction=-1))
        assert base - auroc(moved) == pytest.approx(k / total, abs=1e-12)


def test_pair_strategies_resolve_k_pairs():
    rng = np.random.default_rng(4)
    for strategy in ("top-first", "bottom-first"):
        for _ in range(10):
            s, l = random_instance(rng, 120, n_min=20)
            d = LabeledScores(s, l)
            _, g = empirical_signal_curve(d, 21, 0.01, strategy)
            total = d.n_pos * d.n_neg
            base = auroc(d)
            np.testing.assert_allclose(g.auroc, base + g.increments / total, atol=1e-12)


def _skewed(n=4000, prevalence=0.05, seed=0):
    rng = np.random.default_rng(seed)
    n_pos = int(n * prevalence)
    return LabeledScores.from_classes(rng.normal(0.8, 1, n_pos), rng.normal(0, 1, n - n_pos))


def test_top_first_raises_auprc_faster():
    d = _skewed()
    add, _ = empirical_signal_curve(d, 201, 0.002, "additive")
    top, _ = empirical_signal_curve(d, 201, 0.002, "top-first")
    bottom, _ = empirical_signal_curve(d, 201, 0.002, "bottom-first")
    base = auroc(d)
    for q in (base + 0.05, base + 0.1):
        assert top.companion_at(q) > add.companion_at(q) > bottom.companion_at(q)


def test_curve_contains_baseline_and_is_strictly_increasing():
    rng = np.random.default_rng(9)
    s, l = random_instance(rng, 200, n_min=200)
    d = LabeledScores(s, l)
    for strategy in ImprovementStrategy:
        curve, grid = empirical_signal_curve(d, 101, 0.01, strategy)
        i = int(np.flatnonzero(grid.increments == 0)[0])
        assert (curve.quality[i], curve.companion[i]) == (auroc(d), auprc(d))
        assert np.all(np.diff(curve.quality) > 0)
        for inc, q in zip(grid.increments[::7], grid.auroc[::7]):
            if strategy is ImprovementStrategy.ADDITIVE_SHIFT:
                moved = shifted_scores(d, inc)
                assert q == pytest.approx(pair_count_auroc(moved.positives, moved.negatives),
                                          abs=1e-12)
        assert np.all(np.diff(grid.increments) > 0)


def test_single_point_grid():
    d = _skewed(400)
    curve, grid = empirical_signal_curve(d, n_points=1)
    assert len(curve) == 1
    assert (curve.quality[0], curve.companion[0]) == (auroc(d), auprc(d))


def test_fixed_step_and_truncation():
    d = _skewed(2000, 0.1, seed=3)
    curve, grid = empirical_signal_curve(d, 1000, 0.001)
    up = grid.increments[grid.increments > 0]
    down = grid.increments[grid.increments < 0]
    # one fixed step per direction, never recomputed
    np.testing.assert_allclose(up, grid.step_up * np.arange(1, up.size + 1), rtol=1e-12)
    np.testing.assert_allclose(down[::-1], -grid.step_down * np.arange(1, down.size + 1),
                               rtol=1e-12)
    # 999 fixed steps of about .001 AUROC run past 0.5 on the way down
    assert grid.truncated and grid.notes
    assert curve.quality[0] >= 0.5 and curve.quality[-1] <= 1.0
    assert len(curve) < 1000


def test_first_step_size_near_target():
    d = _skewed(3000, 0.1, seed=5)
    _, grid = empirical_signal_curve(d, 11, 0.001)
    i = int(np.flatnonzero(grid.increments == 0)[0])
    assert grid.auroc[i + 1] - grid.auroc[i] == pytest.approx(0.001, abs=2 / (d.n_pos * d.n_neg))


def test_argument_validation():
    with pytest.raises(ValueError):
        empirical_signal_curve(EXAMPLE, 0)
    with pytest.raises(ValueError):
        empirical_signal_curve(EXAMPLE, 10, 0.0)
    with pytest.raises(ValueError):
        SignalCurve([0.5, 0.5], [0.1, 0.2])
    with pytest.raises(ValueError):
        SignalCurve([0.5, 0.6], [0.2, 0.1])


def test_map_round_trip_and_interpolation():
    c = SignalCurve([0.5, 0.6, 0.7, 0.8], [0.1, 0.2, 0.4, 0.8])
    for q, v in zip(c.quality, c.companion):
        assert map_to_quality(c, v) == pytest.approx(q, abs=1e-9)
    assert map_to_quality(c, 0.3) == pytest.approx(0.65)
    with pytest.raises(ExtrapolationError):
        map_to_quality(c, 0.05)
    with pytest.raises(ExtrapolationError):
        map_to_quality(c, 0.81)


def test_plateau_collapses_to_midpoint():
    c = SignalCurve([0.5, 0.6, 0.7, 0.8], [0.1, 0.3, 0.3, 0.5])
    assert map_to_quality(c, 0.3) == pytest.approx(0.65)
    assert map_to_quality(c, 0.2) == pytest.approx(0.575)
    flat = SignalCurve([0.5, 0.7], [0.2, 0.2])
    assert map_to_quality(flat, 0.2) == pytest.approx(0.6)


def test_identity_like_binormal_curve():
    c = binormal_signal_curve(0.5, step=0.001)
    for v in np.linspace(0.51, 0.98, 30):
        assert abs(map_to_quality(c, v) - v) <= 0.02
    for q, v in zip(c.quality[::37], c.companion[::37]):
        assert map_to_quality(c, v) == pytest.approx(q, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=2, max_size=30), st.floats(0, 1), st.floats(0, 1))
def test_map_is_monotone(values, u, w):
    comp = np.sort(np.asarray(values))
    q = np.linspace(0.5, 0.99, comp.size)
    c = SignalCurve(q, comp)
    lo, hi = c.companion_range
    a, b = sorted((lo + u * (hi - lo), lo + w * (hi - lo)))
    a, b = min(max(a, lo), hi), min(max(b, lo), hi)
    assert map_to_quality(c, a) <= map_to_quality(c, b)


def test_window():
    c = SignalCurve(np.linspace(0.5, 0.9, 41), np.linspace(0.1, 0.5, 41))
    w = c.window(0.7, 5)
    assert len(w) == 11 and w.quality[5] == pytest.approx(0.7)
    assert len(c.window(0.5, 5)) == 6
