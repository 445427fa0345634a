import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from percolab import estimators, lattice, sampler
from percolab.estimators import ArmEstimate

trials = st.integers(0, 10**9)


def test_reference_exponents():
    assert estimators.alternating_exponent(2) == pytest.approx(-0.25)
    assert estimators.alternating_exponent(4) == pytest.approx(-1.25)
    assert estimators.half_plane_exponent(1) == pytest.approx(-1 / 3)
    assert estimators.half_plane_exponent(3) == pytest.approx(-2.0)
    assert estimators.reference_exponent(sampler.one_arm()) == pytest.approx(-5 / 48)
    assert estimators.reference_exponent(sampler.five_arm()) == -2.0
    assert estimators.reference_exponent(sampler.box_left_right()) is None


@given(st.integers(1, 10), st.integers(0, 10))
def test_no_annulus_means_probability_one(R, extra):
    est = estimators.estimate_arm(sampler.one_arm(), R + extra, R, 5)
    assert est.conventional and est.p_hat == 1.0 and est.ci == (1.0, 1.0)


@given(st.floats(-3, -0.05), st.floats(0.1, 1.0))
def test_power_law_fit_recovers_slope(slope, c):
    R = np.array([8, 16, 32, 64, 128])
    fit = estimators.fit_power_law(R, c * R ** slope, reference=slope, tolerance=0.01)
    assert fit.slope == pytest.approx(slope, abs=1e-12)
    assert fit.verdict and fit.deviation == pytest.approx(0, abs=1e-12)


def test_synthetic_quarter_exponent():
    R = np.array([16, 32, 64, 128, 256])
    fit = estimators.fit_power_law(R, 0.7 * R ** -0.25)
    assert abs(fit.slope + 0.25) < 1e-12


def test_wilson_interval_coverage():
    gen = np.random.default_rng(0)
    for p, n in ((0.05, 100), (0.3, 200), (0.9, 50)):
        ks = gen.binomial(n, p, size=1500)
        cover = np.mean([lo <= p <= hi for lo, hi in (estimators.wilson(k, n) for k in ks)])
        assert cover >= 0.93


def test_wilson_edges():
    lo, hi = estimators.wilson(0, 20)
    assert lo == 0 and 0 < hi < 0.2
    assert estimators.wilson(0, 0) == (0.0, 1.0)
    with pytest.raises(ValueError):
        ArmEstimate(sampler.one_arm(), 1, 4, 10, 11)


@pytest.mark.parametrize("event", [sampler.one_arm(), sampler.one_arm(sampler.BLACK),
                                   sampler.alternating_arms(2), sampler.alternating_arms(4),
                                   sampler.half_plane_arms((1,))],
                         ids=lambda e: e.label)
def test_multi_radius_matches_full_decision(event):
    r, radii, n = 2, (5, 8, 12), 150
    fast = estimators.arm_outcomes(event, r, radii, 3, 0, n)
    for q, R in enumerate(radii):
        dom = estimators.arm_domain(event, r, R)
        slow = [sampler.decide(sampler.sample(dom, 0.5, 3, t), event) for t in range(n)]
        assert fast[:, q].tolist() == slow


@pytest.mark.parametrize("event,lat,r,radii", [
    (sampler.five_arm(), lattice.SQUARE, 1, (3, 5, 8)),
    (sampler.one_arm(), lattice.SQUARE, 1, (3, 5, 8)),
    (sampler.j_clusters(2), lattice.TRIANGULAR, 2, (5, 8, 12)),
    (sampler.half_plane_arms((1, 0)), lattice.TRIANGULAR, 2, (5, 8, 12)),
], ids=["five-arm", "square-one-arm", "j-clusters", "half-plane-two"])
def test_radius_sweep_with_early_exit_matches_full_decision(event, lat, r, radii):
    n = 150
    fast = estimators.arm_outcomes(event, r, radii[::-1], 3, 0, n, lat)[:, ::-1]
    for q, R in enumerate(radii):
        dom = estimators.arm_domain(event, r, R, lat)
        slow = [sampler.decide(sampler.sample(dom, 0.5, 3, t), event) for t in range(n)]
        assert fast[:, q].tolist() == slow


def test_three_methods_agree():
    ev = sampler.one_arm()
    a = estimators.estimate_arm(ev, 2, 9, 200, seed=4, method="decide")
    b = estimators.estimate_arm(ev, 2, 9, 200, seed=4, method="explore")
    c = estimators.estimate_arm(ev, 2, 9, 200, seed=4, method="multi")
    assert a.successes == b.successes == c.successes


def test_arm_events_are_nested_samplewise():
    r, radii, n = 2, (6, 10, 16), 400
    one = estimators.arm_outcomes(sampler.one_arm(), r, radii, 5, 0, n)
    two = estimators.arm_outcomes(sampler.alternating_arms(2), r, radii, 5, 0, n)
    four = estimators.arm_outcomes(sampler.alternating_arms(4), r, radii, 5, 0, n)
    half = estimators.arm_outcomes(sampler.half_plane_arms((1,)), r, radii, 5, 0, n)
    assert np.all(two <= one) and np.all(four <= two) and np.all(half <= one)
    # an arm to a larger radius is also an arm to every smaller one
    assert np.all(np.diff(one.astype(int), axis=1) <= 0)


def test_fit_needs_enough_radii_and_successes():
    ev = sampler.one_arm()
    ests = [ArmEstimate(ev, 1, R, 100, 50) for R in (4, 8, 16)]
    with pytest.raises(ValueError):
        estimators.fit_exponent(ests)
    ests = [ArmEstimate(ev, 1, R, 100, k) for R, k in ((4, 80), (8, 60), (16, 40), (32, 0))]
    with pytest.raises(estimators.InsufficientTrials):
        estimators.fit_exponent(ests)


def test_curve_fit_slope_is_negative():
    ests = estimators.estimate_arm_curve(sampler.one_arm(), 2, (4, 8, 16, 32), 2000, seed=6)
    fit = estimators.fit_exponent(ests)
    assert fit.slope < 0 and fit.reference == pytest.approx(-5 / 48)


def test_quasi_multiplicativity_degenerate_triple():
    rep = estimators.quasi_mult_table(2, [(4, 4, 8), (4, 8, 8)], 300, seed=7)
    assert [row.ratio for row in rep.rows] == [1.0, 1.0]


def test_quasi_multiplicativity_ratios():
    triples = estimators.increasing_triples((2, 4, 8))
    assert triples == [(2, 4, 8)]
    rep = estimators.quasi_mult_table(2, triples, 3000, seed=8)
    row = rep.rows[0]
    assert 0.3 < row.ratio < 3 and row.ci[0] < row.ratio < row.ci[1]
    with pytest.raises(ValueError):
        estimators.quasi_mult_table(3, triples, 10)
    with pytest.raises(ValueError):
        estimators.quasi_mult_table(2, [(8, 4, 2)], 10)


def test_separation_tail_is_monotone():
    tail = estimators.separation_tail(0.25, 16, [0.05, 0.1, 0.2, 0.4, 0.8], 300, seed=9)
    assert np.all(np.diff(tail.tail) >= 0)
    assert 0 <= tail.crossed <= tail.trials
    with pytest.raises(ValueError):
        estimators.separation_tail(1.2, 16, [0.1], 5)


def test_noise_endpoints():
    pts = estimators.noise_sensitivity_curve(6, [0.0, 0.5], 3000, seed=10)
    zero, half = pts
    assert zero.value == pytest.approx(0.25, abs=4 * zero.stderr + 0.02)
    assert abs(half.value) < 4 * half.stderr + 1e-3
    with pytest.raises(ValueError):
        estimators.noise_sensitivity_curve(6, [0.7], 10)


def test_noise_on_square_box_at_zero_is_a_quarter():
    (pt,) = estimators.noise_sensitivity_curve(4, [0.0], 4000, seed=11, lat=lattice.SQUARE)
    # self-dual box: P = 1/2 exactly, so Var = 1/4
    assert abs(pt.value - 0.25) < 4 * math.sqrt(0.25 / 4000) + 0.01


def test_dimension_estimate_pipeline():
    est = estimators.dimension_estimate(lattice.annulus(2, 8), sampler.one_arm(), 3.0, 200,
                                        seed=12)
    assert 0 < est.p_hat <= 1 and est.i_hat > 0
    assert est.bound.regime in ("bound", "empty")


def test_bad_method_and_trials():
    with pytest.raises(ValueError):
        estimators.estimate_arm(sampler.one_arm(), 1, 4, 0)
    with pytest.raises(ValueError):
        estimators.estimate_arm(sampler.one_arm(), 1, 4, 5, method="oracle")
    with pytest.raises(ValueError):
        estimators.estimate_arm(sampler.alternating_arms(2), 1, 4, 5, method="explore")


def test_separation_tail_endpoints():
    tail = estimators.separation_tail(0.5, 64, [0.05, 0.2, 3.0], 150, seed=13)
    assert tail.tail[0] < 1 and np.all(np.diff(tail.tail) >= 0)
    # no two outer endpoints are 3R apart, so every crossed sample is counted
    assert round(tail.tail[-1] * tail.trials) == tail.crossed


def test_arm_probability_factorises_over_disjoint_annuli():
    ev = sampler.alternating_arms(2)
    n = 4000
    whole = estimators.estimate_arm(ev, 4, 32, n, seed=14, method="multi")
    inner = estimators.estimate_arm(ev, 4, 8, n, seed=15, method="multi")
    outer = estimators.estimate_arm(ev, 16, 32, n, seed=16, method="multi")
    bound = inner.ci[1] * outer.ci[1]
    assert whole.ci[0] <= bound
