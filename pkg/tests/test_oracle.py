from fractions import Fraction
from itertools import combinations

import networkx as nx
import pytest

from src.wedge_sampler.config import BinConfig
from src.wedge_sampler.errors import OracleLimitError
from src.wedge_sampler.oracle import (
    Graph,
    enumerate_triangles,
    exact_stats,
    exact_summaries,
    triangle_degrees,
)
from src.wedge_sampler.records import BinSummary

SINGLETONS = BinConfig(tau=4, omega=2.0)


def complete(n: int) -> Graph:
    return Graph.from_edges(combinations(range(n), 2))


class TestWorkedExample:
    def test_global_statistics(self, fig2_edges):
        stats = exact_stats(Graph.from_edges(fig2_edges), SINGLETONS)

        assert stats.n == 6
        assert stats.m == 7
        assert stats.p == 12
        assert stats.t == 1
        assert stats.c == Fraction(1, 4)
        assert stats.triangles == [(3, 4, 5)]

    def test_bins(self, fig2_edges):
        stats = exact_stats(Graph.from_edges(fig2_edges), SINGLETONS)

        assert {b: s.n for b, s in stats.bins.items()} == {1: 1, 2: 3, 3: 1, 4: 1}
        assert {b: s.p for b, s in stats.bins.items()} == {1: 0, 2: 3, 3: 3, 4: 6}
        assert {b: s.c for b, s in stats.bins.items()} == {
            1: None,
            2: Fraction(1, 3),
            3: Fraction(1, 3),
            4: Fraction(1, 6),
        }
        assert stats.nodes[4].c == Fraction(1, 6)
        assert stats.nodes[6].c is None

    def test_summaries_skip_empty_bins(self, fig2_edges):
        stats = exact_stats(Graph.from_edges(fig2_edges), SINGLETONS)

        assert exact_summaries(stats) == [
            BinSummary(2, 2, 1, 0, 0, 1 / 3, 3, 1.0),
            BinSummary(3, 2, 1, 0, 0, 1 / 3, 3, 1.0),
            BinSummary(4, 5, 1, 0, 0, 1 / 6, 6, 1.0),
        ]

    def test_triangle_degrees(self, fig2_edges):
        graph = Graph.from_edges(fig2_edges)
        assert triangle_degrees(graph, enumerate_triangles(graph)) == [(2, 3, 4)]


@pytest.mark.parametrize(
    ("graph", "triangles", "c"),
    [
        (complete(3), 1, Fraction(1)),
        (complete(4), 4, Fraction(1)),
        (Graph.from_edges([(0, 1), (1, 2), (2, 3), (3, 0)]), 0, Fraction(0)),
        (Graph.from_edges([(0, 1), (1, 2), (1, 3), (3, 4)]), 0, Fraction(0)),
    ],
    ids=["K3", "K4", "C4", "tree"],
)
def test_small_graphs(graph, triangles, c):
    stats = exact_stats(graph, BinConfig())
    assert stats.t == triangles
    assert stats.c == c


def test_graph_without_wedges():
    stats = exact_stats(Graph.from_edges([(0, 1), (2, 3)]), BinConfig())
    assert stats.c is None
    assert exact_summaries(stats) == []


def test_matches_networkx():
    nx_graph = nx.gnm_random_graph(80, 600, seed=1)
    graph = Graph.from_edges(nx_graph.edges())

    stats = exact_stats(graph, BinConfig(tau=3, omega=1.5))

    assert stats.t == sum(nx.triangles(nx_graph).values()) // 3
    assert float(stats.c) == pytest.approx(nx.transitivity(nx_graph))
    local = nx.clustering(nx_graph)
    for v, node in stats.nodes.items():
        expected = local[v]
        assert (0.0 if node.c is None else float(node.c)) == pytest.approx(expected)
    assert sum(s.n for s in stats.bins.values()) == stats.n


def test_bin_tallies_count_each_closed_wedge():
    graph = complete(5)
    stats = exact_stats(graph, BinConfig())
    # Every vertex has degree 4, so each closed wedge has all three vertices in bin 3.
    assert stats.bins[3].p3 == 30
    assert stats.bins[3].t == 10


def test_is_closed(fig2_edges):
    graph = Graph.from_edges(fig2_edges)

    assert graph.is_closed(3, 4)
    assert graph.is_closed(4, 3)
    assert not graph.is_closed(1, 4)
    assert not graph.is_closed(1, 99)


def test_from_edges_drops_self_edges_and_duplicates():
    graph = Graph.from_edges([(1, 2), (2, 1), (3, 3), (2, 3)])
    assert graph.edge_count == 2
    assert graph.degree(3) == 1


def test_edge_limit(fig2_edges, fig2_path):
    with pytest.raises(OracleLimitError) as exc_info:
        Graph.from_edges(fig2_edges, limit=3)
    assert exc_info.value.limit == 3

    with pytest.raises(OracleLimitError):
        Graph.from_file(fig2_path, limit=6)
    assert Graph.from_file(fig2_path, limit=7).edge_count == 7
