import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from commn import Graph, Partition
from commn.centrality import (
    CentralityScores,
    betweenness_centrality,
    commn_centrality,
    commn_score,
    degree_centrality,
    leading_eigenvector,
    mod_centrality,
    rank,
)
from commn.community import community_mus, split_degrees

from conftest import clique_edges
from oracles import brute_betweenness, eigen_mod, random_connected_graph, straight_line_commn


def test_degree_examples(star4, triangle):
    assert degree_centrality(star4).values.tolist() == [4, 1, 1, 1, 1]
    assert degree_centrality(triangle).values.tolist() == [2, 2, 2]
    path = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert degree_centrality(path).values.tolist() == [1, 2, 1]


def test_betweenness_examples(star4):
    path = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert betweenness_centrality(path).values.tolist() == [0, 1, 0]
    assert betweenness_centrality(star4).values.tolist() == [6, 0, 0, 0, 0]
    c4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    oracle = brute_betweenness(c4)
    assert all(v == pytest.approx(0.5) for v in oracle.values())
    assert betweenness_centrality(c4).values == pytest.approx([0.5] * 4, abs=1e-12)


def test_betweenness_disconnected_and_masked():
    g = Graph.from_edges(6, [(0, 1), (1, 2), (3, 4), (4, 5)])
    assert betweenness_centrality(g).values.tolist() == [0, 1, 0, 0, 1, 0]
    h = g.with_active(np.array([True, False, True, True, True, True]))
    sc = betweenness_centrality(h)
    assert sc.nodes.tolist() == [0, 2, 3, 4, 5]
    assert sc[4] == 1 and sc[0] == 0


def test_betweenness_matches_enumeration(rng):
    for _ in range(20):
        n = int(rng.integers(2, 9))
        g = Graph.from_edges(n, random_connected_graph(rng, n, 0.3))
        oracle = brute_betweenness(g)
        got = betweenness_centrality(g).as_dict()
        for v in oracle:
            assert got[v] == pytest.approx(oracle[v], abs=1e-9)


def test_commn_bridge_example(bridged_triangles):
    g, part = bridged_triangles
    cc = commn_centrality(g, part)
    assert cc[0] == pytest.approx(20 / 9)
    assert cc[1] == pytest.approx(20 / 9)
    assert cc[2] == pytest.approx(52 / 9)
    assert cc[3] == pytest.approx(52 / 9)
    assert rank(cc)[:2].tolist() == [2, 3]
    oracle, _, _ = straight_line_commn(g, part.community_of.tolist())
    for v, s in oracle.items():
        assert cc[v] == pytest.approx(s, abs=1e-12)


def test_commn_isolated_community_follows_in_degree():
    edges = [(0, 1), (0, 2), (0, 3), (1, 2)] + [(4, 5)]
    g = Graph.from_edges(6, edges)
    part = Partition([0, 0, 0, 0, 1, 1])
    cc = commn_centrality(g, part)
    k_in, _ = split_degrees(g, part)
    assert cc[0] == pytest.approx(3.0)  # (1 + 0) * 3/3 * 3
    assert cc[3] == pytest.approx(1.0)
    assert [v for v in rank(cc) if v < 4] == [0, 1, 2, 3]


def test_commn_comparator_case3():
    # shared normalisers, mu = 0, max_in = max_out = R
    i = commn_score(5, 1, 0.0, 5, 5, 5)
    j = commn_score(4, 2, 0.0, 5, 5, 5)
    assert j > i


def test_commn_zero_normaliser_terms():
    assert commn_score(0, 3, 0.5, 0, 3, 2) == pytest.approx(0.5 * 4)
    assert commn_score(2, 0, 0.5, 2, 0, 2) == pytest.approx(1.5 * 2)


def test_commn_r_override(bridged_triangles):
    g, part = bridged_triangles
    with pytest.raises(ValueError):
        commn_centrality(g, part, r=0.5)
    cc = commn_centrality(g, part, r=1)
    assert cc[2] == pytest.approx(10 / 9 + 8 / 9)


def test_commn_skips_fully_removed_community(bridged_triangles):
    g, part = bridged_triangles
    h = g.with_active(np.array([True, True, True, False, False, False]))
    cc = commn_centrality(h, part)
    assert cc.nodes.tolist() == [0, 1, 2]
    assert cc.values == pytest.approx([2.0, 2.0, 2.0])


@st.composite
def graph_and_partition(draw, max_n=30):
    n = draw(st.integers(2, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    p = draw(st.floats(0.05, 0.5))
    iu = np.triu_indices(n, 1)
    keep = rng.random(len(iu[0])) < p
    edges = list(zip(iu[0][keep].tolist(), iu[1][keep].tolist()))
    c = draw(st.integers(1, min(n, 5)))
    comm = rng.integers(c, size=n)
    comm[:c] = np.arange(c)
    return Graph.from_edges(n, edges), Partition(comm.tolist())


@settings(max_examples=150, deadline=None)
@given(graph_and_partition())
def test_commn_matches_straight_line(gp):
    g, part = gp
    cc = commn_centrality(g, part).as_dict()
    oracle, kin, kout = straight_line_commn(g, part.community_of.tolist())
    for v in oracle:
        assert cc[v] == pytest.approx(oracle[v], abs=1e-9)
        assert kin[v] + kout[v] == g.degrees()[v]


@settings(max_examples=150, deadline=None)
@given(graph_and_partition())
def test_commn_dominance(gp):
    g, part = gp
    cc = commn_centrality(g, part).as_dict()
    _, kin, kout = straight_line_commn(g, part.community_of.tolist())
    mus = np.nan_to_num(community_mus(g, part))
    comm = part.community_of
    for i in cc:
        for j in cc:
            if comm[i] != comm[j] or mus[comm[i]] >= 1:
                continue
            if kin[i] >= kin[j] and kout[i] >= kout[j] and (kin[i] > kin[j] or kout[i] > kout[j]):
                assert cc[i] > cc[j]


@given(st.integers(0, 20), st.integers(0, 20), st.integers(0, 20), st.integers(0, 20), st.integers(1, 20))
def test_commn_case3_literal_rule(ki_in, ki_out, kj_in, kj_out, r):
    # unweighted configuration: mu = 0 and max_in = max_out = R
    big = max(ki_in, ki_out, kj_in, kj_out, r)
    ci = commn_score(ki_in, ki_out, 0.0, big, big, big)
    cj = commn_score(kj_in, kj_out, 0.0, big, big, big)
    if ki_in - kj_in < kj_out**2 - ki_out**2:
        assert cj > ci
    elif ki_in - kj_in == kj_out**2 - ki_out**2:
        assert cj == pytest.approx(ci)
    else:
        assert cj < ci


def test_mod_fallback_single_community(two_cliques):
    part = Partition([0] * 10)
    sc = mod_centrality(two_cliques, part)
    assert sc.values.tolist() == two_cliques.degrees().tolist()


def test_mod_symmetric_two_communities(two_cliques):
    part = Partition([0] * 5 + [1] * 5)
    sc = mod_centrality(two_cliques, part)
    # u = (1/sqrt2, 1/sqrt2) so each bridge end scores 2 * (1/2) * d = d = 1
    assert sc[4] == pytest.approx(1.0, abs=1e-9)
    assert sc[5] == pytest.approx(1.0, abs=1e-9)
    assert sc[0] == 0.0
    oracle = eigen_mod(two_cliques, part.community_of.tolist())
    assert sc[4] == pytest.approx(oracle[4], abs=1e-9)


def test_mod_matches_eigen_oracle(rng):
    for _ in range(10):
        n = int(rng.integers(10, 40))
        g = Graph.from_edges(n, random_connected_graph(rng, n, 0.15))
        c = int(rng.integers(2, 8))
        comm = rng.integers(c, size=n)
        comm[:c] = np.arange(c)
        part = Partition(comm.tolist())
        got = mod_centrality(g, part).as_dict()
        oracle = eigen_mod(g, part.community_of.tolist())
        for v in oracle:
            assert got[v] == pytest.approx(oracle[v], abs=1e-6)


def test_leading_eigenvector_scale_invariant(rng):
    w = rng.integers(0, 5, size=(6, 6)).astype(float)
    w = np.triu(w, 1)
    w = w + w.T
    u = leading_eigenvector(w)
    assert np.allclose(leading_eigenvector(7.5 * w), u, atol=1e-9)
    assert np.linalg.norm(u) == pytest.approx(1.0)
    assert np.all(u >= 0)
    vals, vecs = np.linalg.eigh(w)
    assert np.allclose(u, np.abs(vecs[:, -1]), atol=1e-8)


def test_leading_eigenvector_bipartite():
    w = np.array([[0.0, 3.0], [3.0, 0.0]])
    assert np.allclose(leading_eigenvector(w), [2**-0.5, 2**-0.5])


def test_rank_examples():
    assert rank({0: 3, 1: 5, 2: 3}).tolist() == [1, 0, 2]
    assert rank({3: 1.0, 1: 1.0, 2: 1.0}).tolist() == [1, 2, 3]
    assert rank({}).tolist() == []


def test_scores_reject_non_finite():
    with pytest.raises(ValueError):
        CentralityScores("x", np.array([0]), np.array([np.nan]))


def test_measures_on_clique_edges():
    g = Graph.from_edges(4, clique_edges(range(4)))
    assert betweenness_centrality(g).values.tolist() == [0, 0, 0, 0]
