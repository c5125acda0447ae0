import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from graphstein.graph import (
    BRUTE_FORCE_MAX_N,
    Graph,
    GraphFormatError,
    SubgraphPattern,
    brute_force_count,
    codegree_matrix,
    count_edges,
    count_four_cycles,
    count_pattern,
    count_triangles,
    falling_factorial,
    format_edge_list,
    gen_gnp,
    injective_density,
    injective_homomorphisms,
    parse_edge_list,
    read_edge_list,
    write_edge_list,
)
from graphstein.rng import stream

C4, K2, K3 = SubgraphPattern.C4, SubgraphPattern.K2, SubgraphPattern.K3


def test_gnp_extremes():
    assert count_edges(gen_gnp(5, 0.0, 7)) == 0
    assert count_edges(gen_gnp(5, 1.0, 7)) == 10
    assert gen_gnp(5, 1.0, 7) == Graph.complete(5)


@pytest.mark.parametrize("p", [-0.1, 1.5, float("nan")])
def test_gnp_rejects_bad_p(p):
    with pytest.raises(ValueError):
        gen_gnp(5, p, 0)


def test_gnp_deterministic_bitwise():
    a = gen_gnp(130, 0.4, stream(11, 3))
    b = gen_gnp(130, 0.4, stream(11, 3))
    assert np.array_equal(a.rows, b.rows)
    assert a != gen_gnp(130, 0.4, stream(11, 4))


def test_gnp_edge_count_within_four_sigma():
    # P(|T1 - mean| > 4 sd) = 6.33e-5 for Bin(C(1000,2), 1/2) (oracle
    # binomial tail), so over 100 seeds the expected number of violations is
    # 0.0063; we allow at most one.
    n, p = 1000, 0.5
    assert oracles.binomial_two_sided_tail(math.comb(n, 2), p, 4) == pytest.approx(6.334456016e-05, rel=1e-6)
    sd = math.sqrt(math.comb(n, 2) * p * (1 - p))
    bad = sum(abs(count_edges(gen_gnp(n, p, stream(1, s))) - math.comb(n, 2) * p) > 4 * sd for s in range(100))
    assert bad <= 1


def test_small_counts():
    assert count_edges(Graph.empty(4)) == 0
    assert count_edges(Graph.complete(5)) == 10
    assert count_edges(Graph.cycle(4)) == 4
    assert count_four_cycles(Graph.cycle(4)) == 1
    assert count_four_cycles(Graph.path(4)) == 0
    assert count_four_cycles(Graph.complete(5)) == 15
    assert count_four_cycles(Graph.complete(6)) == 45


def test_brute_force_examples():
    assert brute_force_count(Graph.complete(4), C4) == 3
    assert brute_force_count(Graph.complete(3), K3) == 1
    assert brute_force_count(Graph.empty(6), K2) == 0
    assert brute_force_count(Graph.complete(5), C4) == 15
    with pytest.raises(ValueError):
        brute_force_count(Graph.empty(BRUTE_FORCE_MAX_N + 1), K2)


def test_injective_density_examples():
    assert injective_density(Graph.complete(5), K2) == 1.0
    assert injective_density(Graph.empty(5), C4) == 0.0
    assert injective_density(Graph.cycle(4), C4) == pytest.approx(1 / 3, abs=1e-15)
    assert injective_homomorphisms(Graph.cycle(4), C4) == 8
    assert falling_factorial(4, 4) == 24
    with pytest.raises(ValueError):
        injective_density(Graph.complete(3), C4)


def test_counters_match_brute_force_and_oracle():
    rng = np.random.default_rng(5)
    for k in range(60):
        n = int(rng.integers(5, 13))
        p = [0.2, 0.5, 0.8][k % 3]
        g = gen_gnp(n, p, stream(2, k))
        adj = g.adjacency()
        t2 = count_four_cycles(g)
        assert t2 == brute_force_count(g, C4) == int(oracles.c4_count(adj))
        assert count_triangles(g) == brute_force_count(g, K3)
        assert 2 * count_edges(g) == injective_homomorphisms(g, K2)
        assert count_pattern(g, K2) == count_edges(g)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 140), st.floats(0.0, 1.0), st.integers(0, 2**32))
def test_generated_graphs_are_simple(n, p, seed):
    a = gen_gnp(n, p, seed).adjacency()
    assert np.array_equal(a, a.T)
    assert not a.diagonal().any()


def test_codegrees():
    g = gen_gnp(70, 0.5, 4)
    a = g.adjacency().astype(int)
    c = codegree_matrix(g)
    sq = a @ a
    assert np.array_equal(c, sq)


def test_from_adjacency_validation():
    with pytest.raises(ValueError):
        Graph.from_adjacency([[0, 1], [0, 0]])
    with pytest.raises(ValueError):
        Graph.from_adjacency([[1, 0], [0, 0]])


def test_edge_list_round_trip(tmp_path):
    g = gen_gnp(77, 0.3, 8)
    path = tmp_path / "g.txt"
    write_edge_list(g, path)
    h = read_edge_list(path)
    assert h == g
    assert np.array_equal(h.adjacency(), g.adjacency())
    lines = path.read_text().splitlines()
    assert lines[0] == f"77 {count_edges(g)}"
    assert [tuple(map(int, l.split())) for l in lines[1:]] == sorted(g.edges())


@pytest.mark.parametrize(
    "text, line",
    [
        ("3 1\n0 3\n", 2),
        ("3 1\n1 1\n", 2),
        ("3 2\n0 1\n1 0\n", 3),
        ("3 2\n0 1\n", None),
        ("3 1\n0 x\n", 2),
        ("three 1\n", 1),
    ],
)
def test_edge_list_errors(text, line):
    with pytest.raises(GraphFormatError) as info:
        parse_edge_list(text)
    if line is not None:
        assert info.value.lineno == line


def test_format_is_sorted():
    g = Graph.from_edges(4, [(2, 3), (0, 1), (1, 3)])
    assert format_edge_list(g) == "4 3\n0 1\n1 3\n2 3\n"
