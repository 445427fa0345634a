import numpy as np
import pytest
from hypothesis import given, strategies as st

from percolab import lattice, sampler
from percolab.sampler import BLACK, WHITE

import oracles

trials = st.integers(0, 10**9)
BOX = lattice.box(9)
RING = lattice.annulus(2, 7)
SQ_BOX = lattice.square_box(6)
SQ_RING = lattice.square_annulus(1, 3)
HALF = lattice.half_plane_annulus(1, 3)


@given(trials, st.sampled_from([BOX, lattice.rhombus(5, 7), SQ_BOX]))
def test_box_crossing_matches_bfs(t, dom):
    c = sampler.sample(dom, seed=1, trial=t)
    want = oracles.bfs_connects(dom, c.colors, WHITE, "left", "right")
    assert sampler.decide(c, sampler.box_left_right()) == want


@given(trials, st.sampled_from([BOX, SQ_BOX]))
def test_self_duality_of_box_crossings(t, dom):
    # exactly one of a white left-right or a black top-bottom crossing
    c = sampler.sample(dom, seed=2, trial=t)
    lr = oracles.bfs_connects(dom, c.colors, WHITE, "left", "right")
    tb = oracles.bfs_connects(dom, c.colors, BLACK, "top", "bottom")
    assert lr != tb


@given(trials, st.sampled_from([WHITE, BLACK]), st.sampled_from([RING, SQ_RING]))
def test_one_arm_matches_bfs(t, color, dom):
    c = sampler.sample(dom, seed=3, trial=t)
    want = oracles.bfs_connects(dom, c.colors, color, "inner", "outer")
    assert sampler.decide(c, sampler.one_arm(color)) == want


@given(trials, st.integers(1, 4), st.sampled_from([WHITE, BLACK]))
def test_cluster_count_matches_scipy(t, j, color):
    c = sampler.sample(RING, seed=4, trial=t)
    m = oracles.crossing_count(RING, c.colors, color)
    assert sampler.count_crossing_clusters(c, color) == m
    assert sampler.decide(c, sampler.j_clusters(j, color)) == (m >= j)


@given(trials, st.sampled_from([2, 4, 6]))
def test_alternating_arms_from_cluster_counts(t, k):
    c = sampler.sample(RING, seed=5, trial=t)
    mw = oracles.crossing_count(RING, c.colors, WHITE)
    mb = oracles.crossing_count(RING, c.colors, BLACK)
    if mw and mb:
        # crossing clusters of the two colours alternate around the ring
        assert mw == mb
    assert len(sampler.interface_endpoints(c)) == 2 * min(mw, mb)
    assert sampler.decide(c, sampler.alternating_arms(k)) == (2 * min(mw, mb) >= k)


@given(trials, st.lists(st.sampled_from([WHITE, BLACK]), min_size=1, max_size=3))
def test_half_plane_peel_matches_exhaustive_search(t, colors):
    c = sampler.sample(HALF, seed=6, trial=t)
    want = oracles.half_plane_brute(HALF, c.colors, colors)
    assert sampler.decide(c, sampler.half_plane_arms(colors)) == want


@given(trials, st.sampled_from([0.3, 0.5, 0.7]))
def test_five_arm_matches_max_flow(t, p):
    c = sampler.sample(SQ_RING, p=p, seed=7, trial=t)
    assert sampler.decide(c, sampler.five_arm()) == oracles.five_arm_oracle(SQ_RING, c.colors)


def test_five_arm_occurs_on_small_ring():
    hits = sum(sampler.decide(sampler.sample(SQ_RING, seed=8, trial=t), sampler.five_arm())
               for t in range(400))
    assert 0 < hits < 400


def _brute_pivotal(c, ev):
    base = sampler.decide(c, ev)
    out = []
    for i in range(c.domain.n_cells):
        bits = c.bits.copy()
        bits[i] ^= 1
        if sampler.decide(c.with_bits(bits), ev) != base:
            out.append(i)
    return out


@given(trials, st.sampled_from([(BOX, sampler.box_left_right()),
                                (RING, sampler.one_arm()),
                                (RING, sampler.alternating_arms(2)),
                                (HALF, sampler.half_plane_arms((1, 0)))]))
def test_pivotal_set_by_single_flips(t, case):
    dom, ev = case
    c = sampler.sample(dom, seed=9, trial=t)
    assert sampler.pivotal_set(c, ev).tolist() == _brute_pivotal(c, ev)


def test_cell_open_is_its_own_pivotal():
    c = sampler.sample(BOX, seed=0, trial=0)
    ev = sampler.cell_open(5)
    assert sampler.decide(c, ev) == bool(c.bits[5])
    assert sampler.pivotal_set(c, ev).tolist() == [5]


def test_constant_configurations():
    assert sampler.decide(sampler.constant(RING, WHITE), sampler.one_arm(WHITE))
    assert not sampler.decide(sampler.constant(RING, WHITE), sampler.one_arm(BLACK))
    assert not sampler.decide(sampler.sample(BOX, p=0.0), sampler.box_left_right())
    assert sampler.decide(sampler.sample(BOX, p=1.0), sampler.box_left_right())


def test_wrong_domain_or_arguments_raise():
    c = sampler.sample(BOX)
    with pytest.raises(ValueError):
        sampler.decide(c, sampler.one_arm())
    with pytest.raises(ValueError):
        sampler.alternating_arms(3)
    with pytest.raises(ValueError):
        sampler.sample(BOX, p=1.5)
    with pytest.raises(ValueError):
        sampler.Configuration(BOX, np.zeros(3, dtype=np.int8))


def test_box_crossing_probability_is_half_on_square_box():
    n = 4000
    k = sum(sampler.decide(sampler.sample(SQ_BOX, seed=10, trial=t), sampler.box_left_right())
            for t in range(n))
    assert abs(k / n - 0.5) < 4 * 0.5 / np.sqrt(n)
