import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resolving_power.binormal import (BinormalModel, PopulationSpec, analytic_auroc, auroc_grid,
                                      binormal_auprc, binormal_signal_curve, hanley_mcneil_se,
                                      normal_ci, ppv_at_recall, shift_for_auroc)

from oracles import binormal_auprc_by_recall_quad, inverse_auroc_by_bisection


def test_shift_examples():
    assert shift_for_auroc(0.5) == 0.0
    assert shift_for_auroc(0.75) == pytest.approx(0.9539, abs=1e-3)
    assert shift_for_auroc(0.75) == pytest.approx(inverse_auroc_by_bisection(0.75), abs=1e-9)
    d = shift_for_auroc(0.99995)
    assert math.isfinite(d) and d > 0
    assert analytic_auroc(BinormalModel.standardized(d)) == pytest.approx(0.99995, abs=1e-9)


@pytest.mark.parametrize("a", [0.49, 1.0, 1.2, float("nan")])
def test_shift_domain(a):
    with pytest.raises(ValueError):
        shift_for_auroc(a)


@pytest.mark.parametrize("a", list(np.round(np.arange(0.5, 0.999, 0.05), 2)) + [0.99, 0.99995])
def test_round_trip(a):
    assert analytic_auroc(BinormalModel.for_auroc(a)) == pytest.approx(a, abs=1e-9)


def test_heights_example():
    m = BinormalModel(mu_neg=164.7, sigma_neg=7.1, mu_pos=178.4, sigma_pos=7.6)
    assert analytic_auroc(m) == pytest.approx(0.906, abs=5e-4)
    assert analytic_auroc(BinormalModel(2.0, 1.5, 2.0, 1.5)) == 0.5


def test_model_validation():
    with pytest.raises(ValueError):
        BinormalModel(sigma_neg=0.0)
    with pytest.raises(ValueError):
        PopulationSpec(BinormalModel(), 0.0, 100)
    with pytest.raises(ValueError):
        PopulationSpec(BinormalModel(), 0.001, 100)
    spec = PopulationSpec(BinormalModel(), 0.05, 10_000)
    assert (spec.n_pos, spec.n_neg) == (500, 9500)


@pytest.mark.parametrize("prev", [0.01, 0.05, 0.2, 0.5])
@pytest.mark.parametrize("auc", [0.55, 0.75, 0.95, 0.999])
def test_auprc_matches_recall_quadrature(prev, auc):
    got = binormal_auprc(model=BinormalModel.for_auroc(auc), prevalence=prev)
    want = binormal_auprc_by_recall_quad(shift_for_auroc(auc), prev)
    assert abs(got - want) < 1e-6


def test_auprc_general_model_matches_recall_quadrature():
    from scipy.integrate import quad
    m = BinormalModel(164.7, 7.1, 178.4, 7.6)
    want = quad(lambda r: ppv_at_recall(r, m, 0.3), 1e-12, 1, limit=500, epsabs=1e-12)[0]
    assert abs(binormal_auprc(model=m, prevalence=0.3) - want) < 1e-6


@pytest.mark.parametrize("prev", [0.01, 0.1, 0.5])
def test_random_classifier_auprc_is_prevalence(prev):
    spec = PopulationSpec(BinormalModel(), prev, 10_000)
    assert binormal_auprc(spec) == pytest.approx(prev, abs=1e-9)


def test_perfect_limit():
    for prev in (0.01, 0.3):
        assert binormal_auprc(model=BinormalModel.standardized(12.0), prevalence=prev) > 0.999


@pytest.mark.parametrize("prev", [0.01, 0.2, 0.5])
@pytest.mark.parametrize("auc", [0.6, 0.9, 0.99995])
def test_quadrature_step_halving(prev, auc):
    m = BinormalModel.for_auroc(auc)
    a = binormal_auprc(model=m, prevalence=prev)
    b = binormal_auprc(model=m, prevalence=prev, panels=192)
    assert abs(a - b) < 1e-7


def test_prevalence_half_is_near_identity():
    for a in np.linspace(0.5, 0.99, 50):
        v = binormal_auprc(model=BinormalModel.for_auroc(a), prevalence=0.5)
        assert abs(v - a) <= 0.02


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 6.0), st.floats(0.01, 2.0), st.floats(0.005, 0.9))
def test_monotone_in_shift_and_prevalence(delta, step, prev):
    lo = binormal_auprc(model=BinormalModel.standardized(delta), prevalence=prev)
    hi = binormal_auprc(model=BinormalModel.standardized(delta + step), prevalence=prev)
    assert hi > lo or hi > 1 - 1e-12
    if delta > 0.01:
        more = binormal_auprc(model=BinormalModel.standardized(delta), prevalence=prev * 1.05)
        assert more > lo


def test_hanley_mcneil_examples():
    lo, hi = normal_ci(0.65, hanley_mcneil_se(0.65, 100, 9900))
    assert lo == pytest.approx(0.591, abs=1e-3) and hi == pytest.approx(0.709, abs=1e-3)
    lo, hi = normal_ci(0.95, hanley_mcneil_se(0.95, 100, 9900))
    assert lo == pytest.approx(0.92, abs=1e-3) and hi == pytest.approx(0.98, abs=1e-3)
    assert hanley_mcneil_se(0.99, 50, 50) < hanley_mcneil_se(0.5, 50, 50)
    # direct evaluation at A = 0.5, one of each class
    assert hanley_mcneil_se(0.5, 1, 1) == pytest.approx(0.5)


@pytest.mark.parametrize("args", [(0.4, 10, 10), (1.0, 10, 10), (0.7, 0, 10), (0.7, 10, 2.5)])
def test_hanley_mcneil_domain(args):
    with pytest.raises(ValueError):
        hanley_mcneil_se(*args)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.5, 0.999), st.integers(1, 500), st.integers(1, 500), st.integers(2, 10))
def test_se_shrinks_with_counts(a, n_pos, n_neg, k):
    assert hanley_mcneil_se(a, n_pos * k, n_neg * k) < hanley_mcneil_se(a, n_pos, n_neg)


def test_auroc_grid():
    g = auroc_grid()
    assert g[0] == 0.5 and g[-1] == pytest.approx(0.99995)
    assert len(g) == 10_000
    assert np.all(np.diff(g) > 0)
    assert len(auroc_grid(0.1)) == 5
    with pytest.raises(ValueError):
        auroc_grid(0.0)


def test_signal_curve_shape():
    c = binormal_signal_curve(0.5, step=0.001)
    assert c.quality[0] == 0.5
    assert c.companion[0] == pytest.approx(0.5, abs=1e-9)
    assert np.all(np.diff(c.quality) > 0) and np.all(np.diff(c.companion) > 0)
    assert np.max(np.abs(c.companion - c.quality)) <= 0.02


def test_low_prevalence_curve_is_convex():
    c = binormal_signal_curve(0.01, step=0.001)
    assert c.companion[0] == pytest.approx(0.01, abs=1e-9)
    assert np.all(np.diff(c.companion) > 0)
    # flat near AUROC .5, steep near 1
    i = np.searchsorted(c.quality, 0.6)
    assert c.companion[i] < 0.02
    slopes = np.diff(c.companion) / np.diff(c.quality)
    assert slopes[-1] > 50 * slopes[0]
    assert np.all(np.diff(slopes) > -1e-6)


def test_signal_curve_matches_scalar_integrator():
    c = binormal_signal_curve(0.1, grid=[0.5, 0.7, 0.93])
    for q, v in zip(c.quality, c.companion):
        assert v == pytest.approx(binormal_auprc(model=BinormalModel.for_auroc(q), prevalence=0.1), abs=1e-14)
