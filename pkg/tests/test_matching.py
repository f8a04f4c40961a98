"""Matching engine vs the exhaustive oracle (and networkx, if importable)."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xcubedec.matching import Matching, WeightedGraph, brute_force_mwpm, mwpm, mwpm_mate


def random_graph(n, wmax, rng):
    w = rng.integers(0, wmax + 1, size=(n, n))
    w = np.triu(w, 1)
    return WeightedGraph(n=n, weights=w + w.T)


def assert_perfect(g, m: Matching):
    seen = sorted(u for pair in m.pairs for u in pair)
    assert seen == list(range(g.n))
    assert m.total_weight == sum(int(g.weights[a, b]) for a, b in m.pairs)


def test_empty_graph():
    g = WeightedGraph(n=0, weights=np.zeros((0, 0), dtype=int))
    assert mwpm(g) == Matching(pairs=(), total_weight=0)
    assert brute_force_mwpm(g) == Matching(pairs=(), total_weight=0)


def test_two_vertices():
    g = WeightedGraph(n=2, weights=np.array([[0, 7], [7, 0]]))
    m = mwpm(g)
    assert m.pairs == ((0, 1),) and m.total_weight == 7
    assert brute_force_mwpm(g).pairs == ((0, 1),)


def test_four_vertices_spec_example():
    w = np.full((4, 4), 10)
    np.fill_diagonal(w, 0)
    w[0, 1] = w[1, 0] = 1
    w[2, 3] = w[3, 2] = 1
    m = mwpm(WeightedGraph(n=4, weights=w))
    assert set(m.pairs) == {(0, 1), (2, 3)}
    assert m.total_weight == 2


def test_all_equal_weights_weight_determined():
    w = np.full((6, 6), 5)
    np.fill_diagonal(w, 0)
    g = WeightedGraph(n=6, weights=w)
    assert mwpm(g).total_weight == 15  # (n/2) * w whatever the pairing
    assert brute_force_mwpm(g).total_weight == 15


def test_odd_vertex_count_rejected():
    with pytest.raises(ValueError, match="odd vertex count"):
        WeightedGraph(n=3, weights=np.zeros((3, 3), dtype=int))
    with pytest.raises(ValueError, match="odd vertex count"):
        mwpm_mate(np.zeros((5, 5), dtype=np.int64))


def test_asymmetric_and_negative_rejected():
    w = np.zeros((2, 2), dtype=int)
    w[0, 1] = 1
    with pytest.raises(ValueError, match="symmetric"):
        WeightedGraph(n=2, weights=w)
    w = np.array([[0, -1], [-1, 0]])
    with pytest.raises(ValueError, match="negative"):
        WeightedGraph(n=2, weights=w)


def test_brute_force_size_limit():
    w = np.zeros((14, 14), dtype=int)
    with pytest.raises(ValueError, match="too large"):
        brute_force_mwpm(WeightedGraph(n=14, weights=w))


def test_oracle_equivalence_500_random_graphs():
    # acceptance criterion 5 protocol: n <= 10, weights uniform in [0, 100]
    rng = np.random.default_rng(550)
    mismatches = 0
    for _ in range(500):
        n = int(rng.choice([2, 4, 6, 8, 10]))
        g = random_graph(n, 100, rng)
        a = mwpm(g)
        b = brute_force_mwpm(g)
        assert_perfect(g, a)
        if a.total_weight != b.total_weight:
            mismatches += 1
    assert mismatches == 0


@given(st.data())
@settings(max_examples=150, deadline=None)
def test_oracle_equivalence_property(data):
    n = data.draw(st.sampled_from([2, 4, 6, 8]))
    flat = data.draw(st.lists(st.integers(0, 12), min_size=n * n, max_size=n * n))
    w = np.array(flat).reshape(n, n)
    w = np.triu(w, 1)
    g = WeightedGraph(n=n, weights=w + w.T)
    a = mwpm(g)
    assert_perfect(g, a)
    assert a.total_weight == brute_force_mwpm(g).total_weight


def test_geometric_tie_heavy_instances():
    rng = np.random.default_rng(77)
    for _ in range(300):
        n = int(rng.choice([4, 6, 8, 10]))
        L = 6
        pts = rng.integers(0, L, size=(n, 2))
        d = np.abs(pts[:, None, :] - pts[None, :, :])
        d = np.minimum(d, L - d).sum(axis=2)
        g = WeightedGraph(n=n, weights=d)
        assert mwpm(g).total_weight == brute_force_mwpm(g).total_weight


def test_matches_networkx_on_midsize_graphs():
    nx = pytest.importorskip("networkx")
    rng = np.random.default_rng(31337)
    for _ in range(25):
        n = int(rng.choice([20, 40, 60]))
        wmax = int(rng.choice([5, 60, 900]))
        g = random_graph(n, wmax, rng)
        mine = mwpm(g)
        assert_perfect(g, mine)
        G = nx.Graph()
        big = (n // 2) * wmax + 1
        for i in range(n):
            for j in range(i + 1, n):
                G.add_edge(i, j, w=big - int(g.weights[i, j]))
        ref = nx.max_weight_matching(G, maxcardinality=True, weight="w")
        ref_total = sum(int(g.weights[u, v]) for u, v in ref)
        assert mine.total_weight == ref_total


def test_deterministic_given_vertex_order():
    rng = np.random.default_rng(4)
    g = random_graph(30, 40, rng)
    first = mwpm(g)
    for _ in range(3):
        assert mwpm(g) == first
