import itertools
import math

import numpy as np
import pytest

from graphstein.couplings import (
    STEIN,
    CapabilityError,
    CouplingModel,
    bernoulli_size_bias,
    check_equal_marginal,
    coin_sum,
    default_family,
    from_equal_marginal_lambda,
    from_exchangeable_pair,
    from_size_bias,
    graph_coupling,
    moment_relations,
    overlapping_bernoulli_size_bias,
    permutation_coupling,
    sign_flip,
    swap_pair,
    verify_identity,
    zero_coupling,
)
from graphstein.couplings.core import identity_terms
from graphstein.couplings.graph import summands
from graphstein.couplings.permutation import drift_samples
from graphstein.permstat import builtin_matrices
from graphstein.rng import stream

TOYS = {
    "coins": coin_sum,
    "swap": swap_pair,
    "flip": sign_flip,
    "bernoulli": bernoulli_size_bias,
    "overlap": overlapping_bernoulli_size_bias,
    "zero": zero_coupling,
}


def _cov(model):
    return moment_relations(model).cov_w


@pytest.mark.parametrize("name", sorted(TOYS))
def test_toy_identity_exact(name):
    model = TOYS[name]()
    rep = verify_identity(model, mode="exact")
    assert rep.passed
    assert rep.max_residual(asserted_only=False) <= 1e-10
    m = moment_relations(model)
    assert np.allclose(m.g_dt, m.cov_w, atol=1e-12)
    if name not in ("bernoulli", "overlap"):
        assert np.allclose(m.mean_w, 0, atol=1e-12)


@pytest.mark.parametrize("name", sorted(TOYS))
def test_toy_identity_mc(name):
    rep = verify_identity(TOYS[name](), mode="mc", reps=20_000, seed=3)
    assert rep.passed


@pytest.mark.parametrize("p", [0.3, 0.5])
def test_graph_coupling_exact(p):
    model = graph_coupling(5, p)
    rep = verify_identity(model, mode="exact")
    assert rep.passed and rep.max_residual(asserted_only=False) <= 1e-10
    m = moment_relations(model)
    assert np.allclose(m.mean_w, 0, atol=1e-10)
    assert np.allclose(m.cov_w, np.eye(2), atol=1e-10)


def test_graph_coupling_mc_and_limits():
    model = graph_coupling(9, 0.4)
    assert not model.enumerable
    with pytest.raises(CapabilityError):
        verify_identity(model, mode="exact")
    assert verify_identity(model, mode="mc", reps=4000, seed=1).passed
    for n, p in ((4, 0.5), (6, 0.0), (6, 1.0)):
        with pytest.raises(ValueError):
            graph_coupling(n, p)


def test_graph_summands_add_up():
    # the Y_i sum to W and each R_i is the neighbourhood sum of Y
    from graphstein.graph import gen_gnp
    from graphstein.homogeneity import w_stats

    n, p = 8, 0.45
    g = gen_gnp(n, 0.5, 17)
    y, r = summands(g.adjacency(), p)
    s = w_stats(g, p)
    assert np.allclose(y.sum(axis=0), [s.w1, s.w2], atol=1e-12)
    quads = list(itertools.combinations(range(n), 4))
    for k in (0, 11, 40):
        nb = [j for j, q in enumerate(quads) if len(set(q) & set(quads[k])) >= 2]
        assert np.allclose(r[k], y[nb].sum(axis=0), atol=1e-12)


@pytest.mark.parametrize("name", sorted(TOYS) + ["graph"])
def test_broken_g_detected(name):
    model = graph_coupling(5, 0.5) if name == "graph" else TOYS[name]()
    broken = model.scaled_g(1.1)
    rep = verify_identity(broken, mode="exact")
    if name == "zero":
        assert rep.passed
        return
    assert not rep.passed
    enum = model.enumeration
    for f, res in zip(default_family(model.dim), rep.results):
        _, rhs = identity_terms(enum.sample, f)
        assert res.residual == pytest.approx(0.1 * float(enum.expect(rhs)), abs=1e-10)
    cov = _cov(model)
    lin = {r.name: r.residual for r in rep.results}
    for i, j in itertools.product(range(model.dim), repeat=2):
        assert lin[f"w{j}*e{i}"] == pytest.approx(0.1 * cov[i, j], abs=1e-10)


def test_linear_image_closure():
    model = overlapping_bernoulli_size_bias()
    rng = stream(8)
    for k in range(5):
        a = rng.standard_normal((int(rng.integers(1, 4)), 2))
        img = model.linear_image(a)
        rep = verify_identity(img, mode="exact")
        assert rep.passed
        assert np.allclose(_cov(img), a @ _cov(model) @ a.T, atol=1e-12)
    with pytest.raises(ValueError):
        model.linear_image(np.ones((2, 3)))


def test_sign_flip_lambda_one_rejected():
    w = np.array([[-1.0], [1.0]])
    with pytest.raises(ValueError):
        from_exchangeable_pair([[1.0]], enumeration=(np.array([0.5, 0.5]), w, -w))
    g = sign_flip().enumeration.sample.g
    assert np.allclose(g, -w / 2)


def test_exchangeable_pair_errors():
    w = np.array([[-1.0], [1.0]])
    with pytest.raises(ValueError):
        from_exchangeable_pair([[0.0]], enumeration=(np.array([0.5, 0.5]), w, -w))
    with pytest.raises(ValueError):
        from_exchangeable_pair(np.ones((2, 2)))


@pytest.mark.parametrize("lam", [0.0, 1.0, -0.3, 1.5])
def test_equal_marginal_lambda_range(lam):
    w = np.array([[-1.0], [1.0]])
    with pytest.raises(ValueError):
        from_equal_marginal_lambda(lam, enumeration=(np.array([0.5, 0.5]), w, -w))


def test_equal_marginal_detects_unequal_laws():
    w = np.array([[-1.0], [1.0]])
    wp = np.array([[-0.5], [0.5]])
    with pytest.raises(ValueError):
        from_equal_marginal_lambda(0.25, enumeration=(np.array([0.5, 0.5]), w, wp))


def test_size_bias_law():
    # E[Y_i f(Y)] = mu_i E f(Y^i) on the overlap example
    model = overlapping_bernoulli_size_bias()
    bits = np.array(list(itertools.product([0.0, 1.0], repeat=3)))
    y = np.column_stack([bits[:, 0] + bits[:, 1], bits[:, 1] + bits[:, 2]])
    mu = y.mean(axis=0)
    enum = model.enumeration
    s = enum.sample
    f = lambda v: np.sin(v[:, 0]) + v[:, 1] ** 2
    for i in range(2):
        rows = s.g[:, i] > 0
        lhs = np.mean(y[:, i] * f(y))
        rhs = mu[i] * np.sum(enum.prob[rows] * f(s.w_prime[rows] + mu)) / enum.prob[rows].sum()
        assert lhs == pytest.approx(rhs, abs=1e-12)
    rows, cols = np.nonzero(s.g)
    assert np.allclose(s.g[rows, cols], 2 * mu[cols])
    assert np.all(np.count_nonzero(s.g, axis=1) == 1)


def test_size_bias_errors():
    with pytest.raises(ValueError):
        from_size_bias(pmf=(np.array([[-1.0], [1.0]]), np.array([0.5, 0.5])))
    with pytest.raises(ValueError):
        from_size_bias([0.0])
    with pytest.raises(ValueError):
        from_size_bias()


def test_permutation_coupling_small():
    model = permutation_coupling(n=4)
    assert model.lam == pytest.approx(0.5)
    chk = check_equal_marginal(model)
    assert chk.max_error <= 1e-10
    assert np.allclose(chk.moments.cov_w[[0, 1], [0, 1]], 1, atol=1e-12)
    rep = verify_identity(model, mode="exact")
    assert rep.passed
    assert all(r.asserted == (r.name.startswith("e") or "*e" in r.name and "tanh" not in r.name) for r in rep.results)
    with pytest.raises(ValueError):
        permutation_coupling(n=2)


def test_permutation_coupling_sampling():
    model = permutation_coupling(n=30)
    assert not model.enumerable
    assert verify_identity(model, mode="mc", reps=4000, seed=2).passed


def test_drift_large_n_within_three_se():
    n = 100
    mats = [builtin_matrices(n, "descent"), builtin_matrices(n, "inversion")]
    resid = drift_samples(mats, stream(21), 100_000)
    z = resid.mean(axis=0) / (resid.std(axis=0, ddof=1) / math.sqrt(len(resid)))
    assert np.all(np.abs(z) <= 3)


def test_capability_error():
    bare = CouplingModel(1, "bare")
    assert bare.variant == STEIN
    with pytest.raises(CapabilityError):
        bare.enumeration
    with pytest.raises(CapabilityError):
        bare.sample(stream(0), 3)
    with pytest.raises(CapabilityError):
        bare.get_conditioner()
    with pytest.raises(ValueError):
        verify_identity(sign_flip(), mode="fuzzy")
