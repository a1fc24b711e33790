import itertools
import threading
from collections import Counter

import pytest
from hypothesis import given

from motifwalk.enumeration import (
    EnumerationGuardError,
    build_mixed_graph,
    build_relationship_graph,
    cached_truth,
    enumerate_cises,
    exact_class_counts,
    exact_concentrations,
    naive_cises,
    rand_esu,
    rand_esu_estimate,
    read_truth,
    truth_path,
)
from motifwalk.fixtures import FIG1_EDGES, complete, fig1, nodes_of, path, random_connected
from motifwalk.graph import LabeledGraph
from motifwalk.motifs import build_registry, induced_cis, noncut_positions
from motifwalk.neighborhood import CisExplorer, frontier, neighbor_cises
from motifwalk.oracle import QueryOracle

from strategies import small_graphs


def test_fig1_has_seven_3_cises():
    g = fig1()
    cs = list(enumerate_cises(g, 3))
    assert len(cs) == 7
    omega = exact_concentrations(g, 3, method="esu")
    assert omega.total_samples_used == 7
    assert (omega[1], omega[2]) == (3 / 7, 4 / 7)


def test_k4_has_four_triangles():
    g = complete(4)
    assert [s.edge_count for s in enumerate_cises(g, 3)] == [3, 3, 3, 3]


def test_triangle_free_graph():
    omega = exact_concentrations(path(6), 3)
    assert omega[2] == 0 and omega[1] == 1
    assert omega.observed == {1}


def test_enumeration_is_deterministic():
    g = random_connected(10, 0.4, 7)
    assert [s.nodes for s in enumerate_cises(g, 4)] == [s.nodes for s in enumerate_cises(g, 4)]


def test_cancellation_stops_enumeration():
    stop = threading.Event()
    stop.set()
    assert list(enumerate_cises(random_connected(10, 0.4, 1), 3, cancel=stop)) == []


def test_fig1_is_the_unique_reconstruction():
    # every graph on 5 labeled nodes that reproduces all quoted Fig. 1 quantities
    pairs = list(itertools.combinations(range(5), 2))
    reg = build_registry(3, "undirected")
    hits = []
    for mask in range(1 << len(pairs)):
        edges = [p for i, p in enumerate(pairs) if mask >> i & 1]
        g = LabeledGraph.from_edges(edges, n=5)
        cs = naive_cises(g, 3)
        if len(cs) != 7:
            continue
        if {s.nodes for s in cs if reg.classify(s) == 1} != {nodes_of("abe"), nodes_of("ace"), nodes_of("ade")}:
            continue
        o = QueryOracle(g)
        bcd = induced_cis(g, nodes_of("bcd"))
        abc = induced_cis(g, nodes_of("abc"))
        ace = induced_cis(g, nodes_of("ace"))
        f = frontier(o, bcd)
        if f.outside_nodes != {0} or neighbor_cises(bcd, f).degree != 3:
            continue
        fa = frontier(o, abc)
        if fa.outside_nodes != set(nodes_of("de")) or neighbor_cises(abc, fa).degree != 5:
            continue
        if len(frontier(o, ace).outside_nodes) != 2:
            continue
        hits.append(sorted(edges))
    assert hits == [sorted(FIG1_EDGES)]


@pytest.mark.parametrize("seed", range(8))
def test_esu_matches_naive(seed):
    g = random_connected(11, 0.25 + 0.05 * (seed % 3), seed)
    for k in range(2, 7):
        esu = sorted(s.nodes for s in enumerate_cises(g, k))
        assert len(esu) == len(set(esu))
        assert esu == sorted(s.nodes for s in naive_cises(g, k))


@given(small_graphs(min_n=2, max_n=9))
def test_compiled_counts_match_reference(g):
    for k in range(2, min(g.n, 5) + 1):
        reg = build_registry(k, g.mode) if g.mode == "undirected" or k <= 3 else None
        if reg is None:
            continue
        assert exact_class_counts(g, k, reg) == exact_class_counts(g, k, reg, method="naive")


def test_relationship_graph_of_fig1():
    rel = build_relationship_graph(fig1(), 3)
    assert len(rel) == 7
    assert rel.degree(nodes_of("bcd")) == 3
    assert rel.degree(nodes_of("abc")) == 5
    assert rel.is_connected() and not rel.is_bipartite()


def test_relationship_graph_guard():
    with pytest.raises(EnumerationGuardError):
        build_relationship_graph(complete(9), 4, guard=50)


def test_relationship_graphs_connected_and_odd_cycled():
    for seed in range(30):
        g = random_connected(4 + seed % 6, 0.3, seed)
        for k in range(2, g.n):
            rel = build_relationship_graph(g, k)
            assert rel.is_connected()
            if g.max_degree >= 3:
                assert not rel.is_bipartite()


def test_even_cycle_relationship_graph_is_bipartite():
    from motifwalk.fixtures import cycle

    rel = build_relationship_graph(cycle(6), 2)
    assert rel.is_connected() and rel.is_bipartite()


@pytest.mark.parametrize("seed", range(4))
def test_edge_association_count(seed):
    g = random_connected(9, 0.35, seed)
    for k in (3, 4):
        rel = build_relationship_graph(g, k - 1)
        unions = Counter(tuple(sorted(set(rel.cises[i].nodes) | set(rel.cises[j].nodes))) for i, j in rel.edges())
        for x in enumerate_cises(g, k):
            i = len(noncut_positions(x.k, x.base, x.key))
            assert unions[x.nodes] == i * (i - 1) // 2


def test_mixed_graph_rules():
    g = random_connected(9, 0.3, 5)
    mix = build_mixed_graph(g)
    for s in mix.cises:
        for t in mix.neighbors(s):
            shared = len(set(s.nodes) & set(t.nodes))
            assert abs(s.k - t.k) <= 1
            assert shared == (min(s.k, t.k) if s.k != t.k else s.k - 1)
        if s.k == 3:
            assert all(t.k != 5 for t in mix.neighbors(s))


def test_rand_esu_full_when_probs_one():
    g = random_connected(10, 0.3, 3)
    sample = rand_esu(QueryOracle(g), g, 3, (1, 1, 1), seed=4)
    assert sorted(s.nodes for s in sample.cises) == sorted(s.nodes for s in enumerate_cises(g, 3))
    assert sample.inclusion_probability == 1.0 and not sample.truncated


def test_rand_esu_inclusion_probability_fig1():
    g = fig1()
    hits = Counter()
    runs = 4000
    for seed in range(runs):
        sample = rand_esu(QueryOracle(g), g, 3, (1, 1, 0.5), seed=seed)
        assert sample.inclusion_probability == 0.5
        hits.update(s.nodes for s in sample.cises)
    assert len(hits) == 7
    for c in hits.values():
        assert abs(c / runs - 0.5) < 0.03


def test_rand_esu_budget_truncates():
    g = random_connected(60, 0.1, 1)
    o = QueryOracle(g, limit_nodes=10)
    sample = rand_esu(o, g, 3, None, seed=0)
    assert sample.truncated and o.distinct_queried == 10
    est = rand_esu_estimate(sample, build_registry(3, "undirected")) if sample.cises else None
    assert est is None or abs(est.total() - 1) < 1e-9


def test_truth_cache_round_trip(tmp_path):
    g = random_connected(12, 0.3, 2)
    reg = build_registry(4, "undirected")
    first = cached_truth(tmp_path, g, 4, reg)
    assert truth_path(tmp_path, g, 4).exists()
    again = read_truth(truth_path(tmp_path, g, 4), reg, g.fingerprint)
    assert again.values == first.values
    other = random_connected(12, 0.3, 3)
    with pytest.raises(ValueError):
        read_truth(truth_path(tmp_path, g, 4), reg, other.fingerprint)
    assert cached_truth(tmp_path, other, 4, reg, compute=False) is None


def test_explorer_degree_equals_relationship_degree():
    g = random_connected(12, 0.3, 12)
    rel = build_relationship_graph(g, 3)
    ex = CisExplorer(QueryOracle(g))
    for s in rel.cises:
        assert ex.state(s).degree == rel.degree(s)
