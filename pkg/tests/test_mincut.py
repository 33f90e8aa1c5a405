"""Cut engines against exhaustive enumeration and an independent flow solver."""

import itertools
import math
import random

import numpy as np
import pytest
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

import gridattack as ga
from conftest import random_weighted_graph


def _graph(nodes, edges):
    return ga.WeightedGraph(
        nodes=tuple(nodes),
        edges=tuple(ga.WeightedEdge(*e) for e in edges),
    )


def test_path_st_cut():
    g = _graph([0, 1, 2], [(0, 0, 1, 2.0), (1, 1, 2, 3.0)])
    cut = ga.min_st_cut(g, 0, 2)
    assert cut.edges == (0,)
    assert cut.weight == pytest.approx(2.0)
    assert cut.side_a == frozenset({0})


def test_triangle_weighted_cuts():
    g = _graph(
        [0, 1, 2],
        [(0, 1, 2, 0.25, False), (1, 1, 0, 0.5, True), (2, 2, 0, 0.25, False)],
    )
    cut = ga.global_min_cut(g)
    assert cut.weight == pytest.approx(0.5)
    assert cut.edges == (0, 2)
    st = ga.min_st_cut(g, 1, 2)
    assert st.weight == pytest.approx(0.5)


def test_infinite_weight_absorbing():
    g = _graph(
        [0, 1, 2],
        [(0, 0, 1, math.inf), (1, 0, 1, 1.0), (2, 1, 2, 5.0)],
    )
    cut = ga.min_st_cut(g, 0, 2)
    assert 0 not in cut.edges
    assert cut.edges == (2,)
    # when every cut is infinite the reported weight is infinite
    blocked = ga.min_st_cut(_graph([0, 1], [(0, 0, 1, math.inf)]), 0, 1)
    assert math.isinf(blocked.weight)


def test_enumerate_counts():
    tri = _graph([0, 1, 2], [(0, 0, 1, 1.0), (1, 1, 2, 1.0), (2, 0, 2, 1.0)])
    cuts = list(ga.enumerate_cuts(tri))
    assert len(cuts) == 3
    assert sorted(c.edges for c in cuts) == [(0, 1), (0, 2), (1, 2)]
    four = _graph([0, 1, 2, 3], [(0, 0, 1, 1.0), (1, 1, 2, 1.0), (2, 2, 3, 1.0)])
    assert len(list(ga.enumerate_cuts(four))) == 7


def test_enumerate_too_large():
    nodes = tuple(range(17))
    edges = tuple(ga.WeightedEdge(i, i, i + 1, 1.0) for i in range(16))
    with pytest.raises(ga.TooLarge):
        list(ga.enumerate_cuts(ga.WeightedGraph(nodes=nodes, edges=edges)))


def test_triangle_unit_global_cut():
    tri = _graph([0, 1, 2], [(0, 0, 1, 1.0), (1, 1, 2, 1.0), (2, 0, 2, 1.0)])
    cut = ga.global_min_cut(tri)
    assert cut.weight == pytest.approx(2.0)


def test_star_unit_global_cut():
    star = _graph([0, 1, 2, 3], [(0, 0, 1, 1.0), (1, 0, 2, 1.0), (2, 0, 3, 1.0)])
    cut = ga.global_min_cut(star)
    assert cut.weight == pytest.approx(1.0)
    assert len(cut.edges) == 1


def test_tie_prefers_fewer_edges():
    # cut {e0} and cut {e1,e2} both weigh 1.0; fewer edges wins
    g = _graph([0, 1, 2], [(0, 0, 1, 1.0), (1, 1, 2, 0.5), (2, 1, 2, 0.5)])
    cut = ga.global_min_cut(g)
    assert cut.edges == (0,)


def test_tie_prefers_lexicographically_smallest_ids():
    tri = _graph([0, 1, 2], [(0, 0, 1, 1.0), (1, 1, 2, 1.0), (2, 0, 2, 1.0)])
    cut = ga.global_min_cut(tri)
    assert cut.edges == (0, 1)


def test_parallel_edges_reported_individually():
    g = _graph([0, 1], [(0, 0, 1, 1.0), (1, 0, 1, 1.0), (2, 0, 1, 1.0)])
    cut = ga.min_st_cut(g, 0, 1)
    assert cut.edges == (0, 1, 2)
    assert cut.weight == pytest.approx(3.0)


def _min_enumerated(g, separating=None):
    best = None
    for cut in ga.enumerate_cuts(g):
        if separating is not None:
            s, t = separating
            if (s in cut.side_a) == (t in cut.side_a):
                continue
        if best is None or cut.weight < best:
            best = cut.weight
    return best


def test_global_min_matches_enumeration():
    rng = random.Random(11)
    for _ in range(40):
        g = random_weighted_graph(rng)
        assert ga.global_min_cut(g).weight == pytest.approx(_min_enumerated(g), abs=1e-12)


def test_st_min_matches_enumeration():
    rng = random.Random(12)
    for _ in range(25):
        g = random_weighted_graph(rng)
        nodes = list(g.nodes)
        for s, t in itertools.combinations(nodes, 2):
            want = _min_enumerated(g, separating=(s, t))
            got = ga.min_st_cut(g, s, t)
            assert got.weight == pytest.approx(want, abs=1e-12)
            assert (s in got.side_a) != (t in got.side_a)


def test_duality_against_independent_flow_solver():
    """Cut weight equals the max flow computed by scipy's solver."""
    rng = random.Random(13)
    for _ in range(20):
        g = random_weighted_graph(rng)
        index = {v: i for i, v in enumerate(g.nodes)}
        n = len(g.nodes)
        caps = np.zeros((n, n), dtype=np.int64)
        for e in g.edges:
            caps[index[e.u], index[e.v]] += round(e.weight * 10**6)
            caps[index[e.v], index[e.u]] += round(e.weight * 10**6)
        s, t = rng.sample(list(g.nodes), 2)
        flow = maximum_flow(csr_matrix(caps), index[s], index[t]).flow_value
        cut = ga.min_st_cut(g, s, t)
        assert cut.weight == pytest.approx(flow / 10**6, abs=1e-6)


def test_weight_equals_member_sum():
    rng = random.Random(14)
    for _ in range(20):
        g = random_weighted_graph(rng)
        by_id = {e.id: e for e in g.edges}
        cut = ga.global_min_cut(g)
        assert cut.weight == pytest.approx(sum(by_id[i].weight for i in cut.edges))
        assert cut.n_secure + cut.n_insecure == len(cut.edges)


def test_determinism():
    rng = random.Random(15)
    for _ in range(10):
        g = random_weighted_graph(rng)
        assert ga.global_min_cut(g) == ga.global_min_cut(g)
        s, t = list(g.nodes)[:2]
        assert ga.min_st_cut(g, s, t) == ga.min_st_cut(g, s, t)


def test_negative_weight_rejected():
    with pytest.raises(ValueError):
        _graph([0, 1], [(0, 0, 1, -1.0)])
