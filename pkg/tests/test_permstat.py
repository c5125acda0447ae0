import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from graphstein.permstat import (
    StatMatrix,
    builtin_matrices,
    check_permutation,
    cov_lemma2,
    descents,
    descents_batch,
    format_permutation,
    fulman_increments,
    fulman_step,
    inverse,
    inversions,
    inversions_batch,
    parse_permutation,
    perm_stat,
    perm_stat_batch,
    random_permutations,
    standardized_batch,
    standardized_descent_inversion,
)
from graphstein.rng import stream

perms_st = st.integers(2, 9).flatmap(lambda n: st.permutations(list(range(n))))


def test_counts_examples():
    n = 7
    ident = np.arange(n)
    assert descents(ident) == inversions(ident) == 0
    rev = ident[::-1].copy()
    assert descents(rev) == n - 1 and inversions(rev) == math.comb(n, 2)
    pi = parse_permutation("2 1 4 3")
    assert descents(pi) == 2 and inversions(pi) == 2


def test_permutation_text_round_trip():
    pi = parse_permutation("3 1 4 2")
    assert pi.tolist() == [2, 0, 3, 1]
    assert format_permutation(pi) == "3 1 4 2"
    for bad in ("1 1 2", "0 1 2", "1 x"):
        with pytest.raises(ValueError):
            parse_permutation(bad)
    with pytest.raises(ValueError):
        check_permutation(np.array([0.0, 1.0]))


def test_batch_counters_agree():
    perms = random_permutations(stream(1), 12, 300)
    assert np.array_equal(descents_batch(perms), [descents(p) for p in perms])
    assert np.array_equal(inversions_batch(perms), [inversions(p) for p in perms])


@settings(max_examples=60, deadline=None)
@given(perms_st)
def test_matrix_statistics_are_counts_of_inverse(pi):
    pi = np.array(pi)
    n = len(pi)
    inv = inverse(pi)
    des = builtin_matrices(n, "descent", scaled=False)
    invm = builtin_matrices(n, "inversion", scaled=False)
    assert perm_stat(des, pi) == pytest.approx(2 * descents(inv) - (n - 1), abs=1e-12)
    assert perm_stat(invm, pi) == pytest.approx(2 * inversions(inv) - math.comb(n, 2), abs=1e-12)
    w = standardized_descent_inversion(inv)
    assert perm_stat(builtin_matrices(n, "descent"), pi) == pytest.approx(w[0], abs=1e-12)
    assert perm_stat(builtin_matrices(n, "inversion"), pi) == pytest.approx(w[1], abs=1e-12)


def test_identity_statistic_is_upper_sum():
    m = StatMatrix.random(8, stream(2))
    assert perm_stat(m, np.arange(8)) == pytest.approx(m.upper.sum(), abs=1e-12)
    with pytest.raises(ValueError):
        perm_stat(m, np.arange(7))


def test_antisymmetry_access():
    m = StatMatrix.random(6, stream(3))
    for i, j in itertools.permutations(range(6), 2):
        assert m[i, j] + m[j, i] == 0.0
    assert np.all(np.diag(m.dense) == 0)
    with pytest.raises(ValueError):
        StatMatrix.from_dense(np.ones((3, 3)))


def test_perm_stat_matches_direct_and_batch():
    rng = stream(4)
    m = StatMatrix.random(9, rng)
    perms = random_permutations(rng, 9, 50)
    direct = [oracles.perm_stat_direct(m.dense, p) for p in perms]
    assert np.allclose(perm_stat_batch(m, perms), direct, atol=1e-12)
    assert np.allclose([perm_stat(m, p) for p in perms], direct, atol=1e-12)


def test_builtin_matrix_values():
    d = builtin_matrices(11, "descent")
    band = np.abs(d.dense)
    assert np.allclose(band[np.abs(np.subtract.outer(range(11), range(11))) == 1], 0.5)
    assert band[np.abs(np.subtract.outer(range(11), range(11))) != 1].max() == 0
    i3 = builtin_matrices(3, "inversion")
    assert np.allclose(np.abs(i3.upper), math.sqrt(3 / 11))
    for n in (3, 10, 57):
        assert builtin_matrices(n, "descent").beta() == pytest.approx(2 * math.sqrt(3 / (n + 1)), rel=1e-14)
    with pytest.raises(ValueError):
        builtin_matrices(5, "cycles")


@pytest.mark.parametrize("n", range(2, 9))
def test_unit_variances(n):
    for kind in ("descent", "inversion"):
        m = builtin_matrices(n, kind)
        assert cov_lemma2(m, m) == pytest.approx(1.0, abs=1e-12)


def test_covariance_formula_against_enumeration():
    rng = stream(5)
    for n in (3, 5, 7):
        for _ in range(3):
            a, b = StatMatrix.random(n, rng), StatMatrix.random(n, rng)
            cov, ma, mb = oracles.exhaustive_perm_cov(a.dense, b.dense)
            assert abs(ma) < 1e-10 and abs(mb) < 1e-10
            assert cov_lemma2(a, b) == pytest.approx(cov, rel=1e-10, abs=1e-12)
    with pytest.raises(ValueError):
        cov_lemma2(StatMatrix.random(3, rng), StatMatrix.random(4, rng))


def test_cross_covariance_decays():
    vals = []
    for n in (10, 100, 1000):
        m1, m2 = builtin_matrices(n, "descent"), builtin_matrices(n, "inversion")
        vals.append(n * abs(cov_lemma2(m1, m2)))
    # n |Cov| levels off (about 5.19 by n = 10^4), so Cov = O(1/n)
    assert max(vals) < 6.0
    assert vals[2] / vals[1] < 1.05


def test_fulman_step_examples():
    pi = np.arange(4)
    assert format_permutation(fulman_step(pi, 1)) == "1 3 4 2"
    assert np.array_equal(fulman_step(pi, 3), pi)
    with pytest.raises(IndexError):
        fulman_step(pi, 4)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_fulman_preserves_uniformity(n):
    counts = {}
    for pi in itertools.permutations(range(n)):
        for i in range(n):
            key = tuple(fulman_step(np.array(pi), i))
            counts[key] = counts.get(key, 0) + 1
    assert len(counts) == math.factorial(n)
    assert set(counts.values()) == {n}


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_fulman_drift_exact(n):
    mats = [builtin_matrices(n, "descent"), builtin_matrices(n, "inversion")]
    for pi in itertools.permutations(range(n)):
        pi = np.array(pi)
        w = np.array([perm_stat(m, pi) for m in mats])
        inc = fulman_increments(mats, pi)
        direct = np.array([[perm_stat(m, fulman_step(pi, i)) for m in mats] for i in range(n)]) - w
        assert np.allclose(inc, direct, atol=1e-12)
        assert np.allclose(inc.mean(axis=0), -(2 / n) * w, atol=1e-12)


def test_standardized_examples():
    w1, _ = standardized_descent_inversion(np.arange(5))
    assert w1 == pytest.approx(-2 / math.sqrt(0.5), rel=1e-15)
    perms = np.array(list(itertools.permutations(range(6))))
    w = standardized_batch(perms)
    assert np.allclose(w.mean(axis=0), 0, atol=1e-12)
    assert np.allclose(w.var(axis=0), 1, atol=1e-12)
    with pytest.raises(ValueError):
        standardized_descent_inversion(np.arange(1))
