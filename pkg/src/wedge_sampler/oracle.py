"""Exact triangle statistics for graphs that fit in memory.

Used as ground truth for the sampling pipeline. Quantities that are ratios
are kept as Fractions so small worked examples compare exactly.
"""

from bisect import bisect_left
from collections import defaultdict
from collections.abc import Iterable
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple

import structlog

from .binning import bin_id
from .config.schema import BinConfig
from .errors import OracleLimitError
from .graph_io import iter_records
from .records import BinSummary, Edge

logger = structlog.get_logger(__name__)

DEFAULT_EDGE_LIMIT = 10**7


class Graph:
    """Undirected simple graph stored as sorted neighbor lists."""

    def __init__(self, adjacency: dict[int, list[int]], edge_count: int):
        self.adjacency = adjacency
        self.edge_count = edge_count

    @classmethod
    def from_edges(
        cls, edges: Iterable[tuple[int, int]], limit: int = DEFAULT_EDGE_LIMIT
    ) -> "Graph":
        neighbors: dict[int, set[int]] = defaultdict(set)
        seen = 0
        for v, w in edges:
            seen += 1
            if seen > limit:
                raise OracleLimitError(seen, limit)
            if v == w:
                continue
            neighbors[v].add(w)
            neighbors[w].add(v)
        adjacency = {v: sorted(ns) for v, ns in neighbors.items()}
        edge_count = sum(len(ns) for ns in adjacency.values()) // 2
        return cls(adjacency, edge_count)

    @classmethod
    def from_file(cls, path: Path, limit: int = DEFAULT_EDGE_LIMIT) -> "Graph":
        return cls.from_edges(iter_records(path, Edge), limit)

    @property
    def vertex_count(self) -> int:
        return len(self.adjacency)

    def degree(self, v: int) -> int:
        return len(self.adjacency.get(v, ()))

    def is_closed(self, v1: int, v2: int) -> bool:
        """True if the edge {v1, v2} exists."""
        a = self.adjacency.get(v1, [])
        b = self.adjacency.get(v2, [])
        if len(a) > len(b):
            a, v2 = b, v1
        i = bisect_left(a, v2)
        return i < len(a) and a[i] == v2


def enumerate_triangles(graph: Graph) -> list[tuple[int, int, int]]:
    """Every triangle once, as an increasing vertex triple.

    Forward algorithm: vertices ranked by (degree, id), each vertex keeps its
    higher-ranked neighbors, and a triangle is found at its lowest-ranked
    vertex by intersecting two such lists.
    """
    order = sorted(graph.adjacency, key=lambda v: (graph.degree(v), v))
    rank = {v: i for i, v in enumerate(order)}
    forward = {
        v: sorted((rank[w] for w in ns if rank[w] > rank[v]))
        for v, ns in graph.adjacency.items()
    }

    triangles: list[tuple[int, int, int]] = []
    for u in order:
        out_u = forward[u]
        for r_v in out_u:
            out_v = forward[order[r_v]]
            i = j = 0
            # Merge intersection of two rank-sorted lists.
            while i < len(out_u) and j < len(out_v):
                a, b = out_u[i], out_v[j]
                if a < b:
                    i += 1
                elif b < a:
                    j += 1
                else:
                    triple = sorted((u, order[r_v], order[a]))
                    triangles.append((triple[0], triple[1], triple[2]))
                    i += 1
                    j += 1
    triangles.sort()
    return triangles


class NodeStats(NamedTuple):
    d: int
    p: int
    t: int
    c: Fraction | None


class ExactBinStats(NamedTuple):
    b: int
    n: int
    p: int
    p0: int
    p1: int
    p2: int
    p3: int

    @property
    def c(self) -> Fraction | None:
        if self.p == 0:
            return None
        return Fraction(self.p1 + self.p2 + self.p3, self.p)

    @property
    def t(self) -> Fraction:
        return self.p1 + Fraction(self.p2, 2) + Fraction(self.p3, 3)


class ExactStats(NamedTuple):
    nodes: dict[int, NodeStats]
    bins: dict[int, ExactBinStats]
    n: int
    m: int
    p: int
    t: int
    triangles: list[tuple[int, int, int]]

    @property
    def c(self) -> Fraction | None:
        """Global clustering coefficient; None when the graph has no wedges."""
        if self.p == 0:
            return None
        return Fraction(3 * self.t, self.p)


def exact_stats(graph: Graph, cfg: BinConfig) -> ExactStats:
    triangles = enumerate_triangles(graph)
    per_vertex: dict[int, int] = defaultdict(int)
    # closed[b][j]: closed wedges centered in bin b with j vertices in b
    closed: dict[int, list[int]] = defaultdict(lambda: [0, 0, 0, 0])
    for triangle in triangles:
        bins = [bin_id(graph.degree(x), cfg) for x in triangle]
        for x, b in zip(triangle, bins):
            per_vertex[x] += 1
            closed[b][bins.count(b)] += 1

    nodes: dict[int, NodeStats] = {}
    bin_n: dict[int, int] = defaultdict(int)
    bin_p: dict[int, int] = defaultdict(int)
    for v in graph.adjacency:
        d = graph.degree(v)
        p = d * (d - 1) // 2
        t = per_vertex.get(v, 0)
        nodes[v] = NodeStats(d, p, t, Fraction(t, p) if p else None)
        b = bin_id(d, cfg)
        bin_n[b] += 1
        bin_p[b] += p

    bins: dict[int, ExactBinStats] = {}
    for b in sorted(bin_n):
        counts = closed.get(b, [0, 0, 0, 0])
        p1, p2, p3 = counts[1], counts[2], counts[3]
        bins[b] = ExactBinStats(
            b, bin_n[b], bin_p[b], bin_p[b] - p1 - p2 - p3, p1, p2, p3
        )

    total_p = sum(bin_p.values())
    logger.debug(
        "Exact statistics computed",
        vertices=graph.vertex_count,
        edges=graph.edge_count,
        triangles=len(triangles),
    )
    return ExactStats(
        nodes=nodes,
        bins=bins,
        n=graph.vertex_count,
        m=graph.edge_count,
        p=total_p,
        t=len(triangles),
        triangles=triangles,
    )


def exact_summaries(stats: ExactStats) -> list[BinSummary]:
    """Bins with wedges in the pipeline's summary schema, every wedge counted."""
    rows = []
    for s in stats.bins.values():
        if s.p == 0:
            continue
        assert s.c is not None
        rows.append(
            BinSummary(s.b, s.p0, s.p1, s.p2, s.p3, float(s.c), s.p, float(s.t))
        )
    return rows


def triangle_degrees(
    graph: Graph, triangles: Iterable[tuple[int, int, int]]
) -> list[tuple[int, int, int]]:
    """Sorted (min, mid, max) vertex degrees of each triangle."""
    out = []
    for triangle in triangles:
        a, b, c = sorted(graph.degree(x) for x in triangle)
        out.append((a, b, c))
    return out
