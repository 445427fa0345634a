import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate, stats

from percolab import dynamics, lattice, sampler
from percolab.dynamics import TimeSet

trials = st.integers(0, 10**9)
BOX = lattice.box(6)
CELL = lattice.rhombus(1, 1)


def _ts(pairs, T=1.0):
    return TimeSet(T, np.array(pairs, dtype=float).reshape(-1, 2))


def test_ring_clocks_are_rate_one_poisson():
    traj = dynamics.generate_trajectory(BOX, 50.0, seed=1)
    counts = np.array([traj.rings(c)[0].size for c in range(BOX.n_cells)])
    gaps = np.concatenate([np.diff(np.r_[0.0, traj.rings(c)[0]]) for c in range(BOX.n_cells)])
    assert abs(counts.mean() - 50.0) < 4 * math.sqrt(50.0 / BOX.n_cells)
    assert stats.kstest(gaps, "expon").pvalue > 1e-4


@given(trials, st.floats(0.0, 5.0))
def test_state_is_the_last_coin(t, when):
    traj = dynamics.generate_trajectory(BOX, 5.0, seed=2, trial=t)
    state = traj.state_at(when)
    for c in range(BOX.n_cells):
        times, coins = traj.rings(c)
        before = coins[times <= when]
        assert state[c] == (before[-1] if before.size else traj.initial[c])


@given(trials)
def test_initial_state_is_the_static_sample(t):
    traj = dynamics.generate_trajectory(BOX, 1.0, seed=3, trial=t)
    assert np.array_equal(traj.state_at(0.0), sampler.sample(BOX, 0.5, 3, t).bits)


def test_same_trial_same_history():
    a = dynamics.FlipHistory.of(dynamics.generate_trajectory(BOX, 3.0, 4, 7))
    b = dynamics.FlipHistory.of(dynamics.generate_trajectory(BOX, 3.0, 4, 7))
    c = dynamics.FlipHistory.of(dynamics.generate_trajectory(BOX, 3.0, 4, 8))
    assert np.array_equal(a.cells, b.cells) and np.array_equal(a.times, b.times)
    assert not np.array_equal(a.times, c.times)


def test_stationary_marginals():
    bits = np.array([dynamics.generate_trajectory(BOX, 4.0, 5, t).state_at(4.0)
                     for t in range(2000)])
    assert abs(bits.mean() - 0.5) < 4 * 0.5 / math.sqrt(bits.size)
    r = np.corrcoef(bits[:, 0], bits[:, 1])[0, 1]
    assert abs(r) < 4 / math.sqrt(bits.shape[0])


@pytest.mark.parametrize("lag", [0.0, 0.5, 2.0])
def test_single_cell_correlation(lag):
    cor = dynamics.time_correlation(CELL, sampler.cell_open(0), lag, 200_000, seed=6)
    assert cor.exact == pytest.approx(0.25 + 0.25 * math.exp(-lag), abs=1e-12)
    assert cor.agrees


def test_small_board_correlation_matches_spectrum():
    dom = lattice.rhombus(2, 2)
    cor = dynamics.time_correlation(dom, sampler.box_left_right(), 0.7, 200_000, seed=7)
    assert cor.agrees


@given(trials)
def test_fast_scan_matches_python_scan(t):
    hist = dynamics.FlipHistory.of(dynamics.generate_trajectory(BOX, 2.0, 8, t))
    ev = sampler.box_left_right()
    fast = dynamics.time_set(hist, ev).intervals.ravel()
    slow = dynamics._scan_python(hist, ev)
    assert np.array_equal(fast, slow)


@given(trials)
def test_time_reversal_mirrors_the_set(t):
    hist = dynamics.FlipHistory.of(dynamics.generate_trajectory(BOX, 2.0, 9, t))
    ev = sampler.box_left_right()
    fwd = dynamics.time_set(hist, ev).intervals
    back = dynamics.time_set(hist.reversed(), ev).intervals
    assert np.allclose(np.sort((2.0 - back).ravel()), np.sort(fwd.ravel()))


def test_cell_open_time_set():
    T, n = 10.0, 400
    sets = [dynamics.crossing_time_set(CELL, sampler.cell_open(0), T, 10, t) for t in range(n)]
    mu = np.array([s.measure for s in sets])
    N = np.array([s.boundary_count for s in sets])
    assert abs(mu.mean() - T / 2) < 4 * mu.std() / math.sqrt(n)
    # switches happen at rate 1/2, so E[N] = T/2
    assert abs(N.mean() - T / 2) < 4 * N.std() / math.sqrt(n)


def test_impossible_event_never_switches():
    dom = lattice.annulus(2, 4)
    ts = dynamics.crossing_time_set(dom, sampler.j_clusters(dom.n_cells), 3.0, 11, 0)
    assert ts.measure == 0 and ts.boundary_count == 0


def test_flip_rate_matches_static_influence():
    ev = sampler.box_left_right()
    fc = dynamics.flip_boundary_count(BOX, ev, 5.0, 300, seed=12)
    st_inf = dynamics.static_influence(BOX, ev, 2000, seed=13)
    gap = abs(fc.influence - st_inf.mean)
    assert gap < 4 * math.hypot(fc.influence_stderr, st_inf.stderr)


def test_time_set_validation_and_membership():
    ts = _ts([(0.1, 0.3), (0.5, 1.0)])
    assert ts.contains(0.1) and not ts.contains(0.3) and ts.contains(0.99)
    assert ts.boundary_count == 3 and ts.measure == pytest.approx(0.7)
    with pytest.raises(ValueError):
        _ts([(0.3, 0.2)])
    with pytest.raises(ValueError):
        _ts([(0.1, 0.5), (0.4, 0.6)])


def test_covering_examples():
    assert dynamics.covering_numbers(_ts([]), 0.1).tolist() == [0]
    for L, e in ((1.0, 0.3), (1.0, 0.25), (0.7, 0.01)):
        assert dynamics.covering_numbers(_ts([(0, L)]), e)[0] == math.ceil(L / e)
    two = _ts([(0.0, 0.01), (0.5, 0.51)])
    assert dynamics.covering_numbers(two, [0.1, 0.6]).tolist() == [2, 1]
    with pytest.raises(ValueError):
        dynamics.covering_numbers(two, 0.0)


def test_covering_bound_along_trajectories():
    stats_ = dynamics.exceptional_time_stats(BOX, sampler.box_left_right(), 4.0, 100, seed=14)
    assert stats_.bound_violations == 0
    assert np.all(np.diff(stats_.covering, axis=1) >= 0)
    assert 0 < stats_.second_moment_ratio <= 1


@given(st.floats(0.05, 0.95))
def test_riesz_energy_of_an_interval(gamma):
    e = dynamics.riesz_energy(_ts([(0, 1)]), gamma)
    assert e == pytest.approx(2 / ((1 - gamma) * (2 - gamma)), rel=1e-12)


def test_riesz_energy_two_intervals_by_quadrature():
    g = 0.5
    ts = _ts([(0.0, 0.2), (0.5, 0.9)])
    self_part = sum(2 * L ** (2 - g) / ((1 - g) * (2 - g)) for L in (0.2, 0.4))
    cross, _ = integrate.dblquad(lambda s, t: abs(t - s) ** -g, 0.0, 0.2, 0.5, 0.9)
    assert dynamics.riesz_energy(ts, g) == pytest.approx(self_part + 2 * cross, rel=1e-8)
    assert dynamics.riesz_energy(_ts([(0, 1)]), g) == pytest.approx(8 / 3)


@given(st.lists(st.floats(0, 1), min_size=2, max_size=10, unique=True), st.floats(0.1, 0.9))
def test_energy_at_least_squared_mass(points, gamma):
    pts = np.sort(points)
    pts = pts[: pts.size // 2 * 2].reshape(-1, 2)
    ts = _ts(pts[pts[:, 1] > pts[:, 0]])
    assert dynamics.riesz_energy(ts, gamma) >= ts.measure ** 2 - 1e-12
    if ts.measure > 1e-9:
        assert dynamics.riesz_energy(ts, gamma, normalize=ts.measure) >= 1 - 1e-9


def test_dimension_examples():
    d = dynamics.dimension_bound(10 ** (-5 / 48), 10 ** (31 / 48))
    assert d.regime == "bound" and d.value == pytest.approx(31 / 36, abs=1e-12)
    assert dynamics.dimension_bound(0.3, 0.9).empty
    assert dynamics.dimension_bound(1.0, 4.0).value == pytest.approx(1.0)
    with pytest.raises(ValueError):
        dynamics.dimension_bound(0.0, 2.0)
    with pytest.raises(ValueError):
        dynamics.dimension_bound(0.5, -1.0)


def test_eps_grid_halves():
    g = dynamics.eps_grid(8.0, 4)
    assert g.tolist() == [4.0, 2.0, 1.0, 0.5]


def test_export_lines(tmp_path):
    traj = dynamics.generate_trajectory(lattice.rhombus(2, 1), 3.0, 15, 0)
    path = tmp_path / "traj.txt"
    traj.export(path)
    rows = [line.split() for line in path.read_text().splitlines()]
    total = sum(traj.rings(c)[0].size for c in range(2))
    assert len(rows) == total
    times = [float(r[1]) for r in rows]
    assert times == sorted(times)
    assert all(r[0] in ("0", "1") and r[2] in ("0", "1") for r in rows)


def test_bad_horizon_and_lag():
    with pytest.raises(ValueError):
        dynamics.generate_trajectory(BOX, 0.0)
    with pytest.raises(ValueError):
        dynamics.generate_trajectory(BOX, 1.0).state_at(2.0)
    with pytest.raises(ValueError):
        dynamics.time_correlation(CELL, sampler.cell_open(0), -1.0, 10)
