from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from percolab import fourier
from percolab.fourier import TruthTable


def direct_coefficients(f: TruthTable) -> list[Fraction]:
    """Definition-level transform, quadratic in the table size."""
    N = 1 << f.n
    out = []
    for S in range(N):
        acc = sum(int(f(x)) * (-1) ** bin(S & x).count("1") for x in range(N))
        out.append(Fraction(acc, N))
    return out


def tables(max_n=6, lo=-3, hi=3):
    return st.integers(0, max_n).flatmap(
        lambda n: st.lists(st.integers(lo, hi), min_size=1 << n, max_size=1 << n).map(
            lambda v: TruthTable(n, np.array(v, dtype=np.int64))))


boolean_tables = tables(4, 0, 1)


@given(tables())
def test_butterfly_matches_definition(f):
    sv = fourier.walsh_transform(f)
    assert [sv.coefficient(S) for S in range(1 << f.n)] == direct_coefficients(f)


@given(tables())
def test_inverse_recovers_the_table(f):
    assert np.array_equal(fourier.inverse_transform(fourier.walsh_transform(f)), f.values)


@given(st.integers(0, 16), st.integers(0, 2**31))
def test_parseval_in_floating_point(n, seed):
    vals = np.random.default_rng(seed).standard_normal(1 << n)
    f = TruthTable(n, vals)
    sv = fourier.walsh_transform(f)
    assert sv.total_weight() == pytest.approx(f.norm2(), rel=1e-12, abs=1e-12)
    back = fourier.inverse_transform(sv)
    assert np.allclose(back, vals, atol=1e-12)


@given(tables())
def test_parseval_exact(f):
    sv = fourier.walsh_transform(f)
    assert sv.total_weight() == f.norm2()
    assert sum(fourier.level_weights(sv)) == f.norm2()


def test_two_bit_and():
    sv = fourier.walsh_transform(fourier.and_function(2))
    assert [sv.coefficient(S) for S in range(4)] == [Fraction(1, 4), Fraction(-1, 4),
                                                       Fraction(-1, 4), Fraction(1, 4)]
    assert fourier.influences(fourier.and_function(2)).per_index == (Fraction(1, 2),) * 2


def test_dictator_and_constant():
    sv = fourier.walsh_transform(fourier.dictator(3, 1))
    nonzero = {S: sv.coefficient(S) for S in range(8) if sv.coefficient(S) != 0}
    assert nonzero == {0: Fraction(1, 2), 2: Fraction(-1, 2)}
    const = fourier.walsh_transform(TruthTable(3, np.full(8, 5, dtype=np.int64)))
    assert const.coefficient(0) == 5 and all(const.coefficient(S) == 0 for S in range(1, 8))


@given(boolean_tables)
def test_influence_equals_spectral_sum(f):
    # for 0/1 valued f: I_i = 4 * sum over S containing i of coefficient^2
    sv = fourier.walsh_transform(f)
    inf = fourier.influences(f)
    for i in range(f.n):
        w = sum(sv.coefficient(S) ** 2 for S in range(1 << f.n) if S >> i & 1)
        assert inf[i] == 4 * w


def _monotone(f):
    return all(f(x) <= f(x | (1 << i)) for x in range(1 << f.n) for i in range(f.n))


def test_monotone_functions_first_level_is_half_influence():
    # every monotone boolean function on up to 3 bits, plus a sample on 4 bits
    count = 0
    for n in range(1, 4):
        for code in range(1 << (1 << n)):
            f = TruthTable(n, np.array([(code >> x) & 1 for x in range(1 << n)], dtype=np.int64))
            if not _monotone(f):
                continue
            count += 1
            sv, inf = fourier.walsh_transform(f), fourier.influences(f)
            for i in range(n):
                assert abs(sv.coefficient(1 << i)) == inf[i] / 2
    assert count == 3 + 6 + 20


@given(boolean_tables, st.floats(0, 0.5))
def test_noise_stability_decreases_with_eps(f, eps):
    sv = fourier.walsh_transform(f)
    a = fourier.noise_stability(sv, eps)
    b = fourier.noise_stability(sv, min(0.5, eps + 0.05))
    assert b <= a + 1e-15
    assert fourier.noise_stability(sv, 0) == f.norm2() - f.mean() ** 2
    assert fourier.noise_stability(sv, Fraction(1, 2)) == 0


@pytest.mark.parametrize("f", [fourier.majority3(), fourier.tribes(2, 2), fourier.parity(3)],
                         ids=["maj3", "tribes", "parity"])
def test_noise_stability_monte_carlo(f):
    sv = fourier.walsh_transform(f)
    for eps in (0.05, 0.2):
        est, se = fourier.noise_stability_mc(f, eps, 200_000, seed=3)
        assert abs(est - float(fourier.noise_stability(sv, eps))) < 4 * se + 1e-3


@pytest.mark.parametrize("n,delta", [(2, Fraction(3, 4)), (3, Fraction(7, 12)),
                                     (4, Fraction(15, 32)), (5, Fraction(31, 80))])
def test_and_revealment_exact(n, delta):
    assert fourier.exact_revealment(fourier.random_order_and(n)).delta == delta


@given(st.integers(2, 5))
def test_revealment_at_least_influence(n):
    f, alg = fourier.and_function(n), fourier.random_order_and(n)
    rev, inf = fourier.exact_revealment(alg), fourier.influences(f)
    assert all(rev.per_bit[i] >= inf[i] for i in range(n))


def test_majority_revealment_against_simulation():
    alg = fourier.majority3_algorithm()
    exact = fourier.exact_revealment(alg)
    gen = np.random.default_rng(1)
    hits = np.zeros(3)
    T = 20_000
    labels = alg.randomness
    for _ in range(T):
        x = int(gen.integers(8))
        r = labels[int(gen.integers(len(labels)))][0]
        _, order = alg.run(x, r)
        hits[list(set(order))] += 1
    for i in range(3):
        p = float(exact.per_bit[i])
        assert abs(hits[i] / T - p) < 4 * np.sqrt(p * (1 - p) / T) + 1e-9


def test_builtin_corpus_has_no_violations():
    for name, f, alg in fourier.builtin_corpus():
        assert fourier.determines(f, alg), name
        assert fourier.conditionally_uniform(alg), name
        assert fourier.check_theorem_noise(f, alg).violations == 0, name
        assert fourier.check_generalized(f, alg).violations == 0, name


def test_witness_is_not_a_query_algorithm():
    f = fourier.recursive_majority(2)
    wit = fourier.recursive_majority_witness(2)
    assert fourier.determines(f, wit)
    assert not fourier.conditionally_uniform(wit)
    report = fourier.check_theorem_noise(f, wit)
    assert report.delta == Fraction(4, 9)
    first = report.levels[0]
    assert first.weight == Fraction(9, 16) and not first.ok


def test_generalized_bound_for_truncated_algorithms():
    f = fourier.and_function(3)
    short = fourier.random_order_and_truncated(3, 2)
    with pytest.raises(fourier.NotExact):
        fourier.check_theorem_noise(f, short)
    rep = fourier.check_generalized(f, short)
    assert rep.expected_variance == Fraction(1, 16) and rep.violations == 0
    blind = fourier.check_generalized(f, fourier.read_nothing(3))
    assert blind.expected_variance == Fraction(7, 64) and blind.delta == 0
    assert blind.violations == 0


def test_stepwise_rejects_repeated_queries():
    alg = fourier.stepwise(2, lambda seen, r: 0, [(None, Fraction(1))], "stuck")
    with pytest.raises(RuntimeError, match="twice"):
        alg.run(0, None)


@given(tables(5, -2, 2))
def test_truth_table_round_trip(tmp_path_factory, f):
    path = tmp_path_factory.mktemp("tt") / "f.txt"
    fourier.write_truth_table(f, path)
    assert np.array_equal(fourier.read_truth_table(path).values, f.values)


def test_truth_table_text_is_lexicographic(tmp_path):
    # lexicographic rows, first coordinate most significant: only x0 = 1 rows are 1
    path = tmp_path / "d.txt"
    path.write_text("2\n0\n0\n1\n1\n")
    f = fourier.read_truth_table(path)
    assert np.array_equal(f.values, fourier.dictator(2, 0).values)
    path.write_text("2\n0\n1\n")
    with pytest.raises(ValueError):
        fourier.read_truth_table(path)


def test_bad_inputs():
    with pytest.raises(ValueError):
        TruthTable(2, np.zeros(3, dtype=np.int64))
    with pytest.raises(ValueError):
        fourier.noise_stability(fourier.walsh_transform(fourier.parity(2)), 1.5)
    with pytest.raises(ValueError):
        fourier.level_weight(fourier.walsh_transform(fourier.parity(2)), 3)
