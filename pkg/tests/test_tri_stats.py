from itertools import combinations

import pytest
from scipy import stats

from src.wedge_sampler.binning import bin_id
from src.wedge_sampler.config import BinConfig, EngineConfig, SkgConfig
from src.wedge_sampler.errors import TriStatsError
from src.wedge_sampler.generator import generate_community, generate_skg
from src.wedge_sampler.graph_io import iter_records
from src.wedge_sampler.oracle import Graph
from src.wedge_sampler.pipeline import WedgeSamplingPipeline
from src.wedge_sampler.records import Sigma, WedgeResultV2
from src.wedge_sampler.tri_stats import (
    AssortativityRow,
    Outlier,
    ASSORTATIVITY_BINS,
    TriangleSample,
    assortativity_table,
    exact_triangles,
    extract_triangles,
    triangle_frequencies,
    write_assortativity,
)

SINGLE = BinConfig.single_bin(1e7)


def sample(d_min: int, d_max: int) -> TriangleSample:
    return TriangleSample(0, 1, 2, d_min, d_min, d_max)


def sampled_triangles(path, run_config, tmp_path, k: int, **overrides):
    run = run_config(
        path,
        tau=SINGLE.tau,
        omega=SINGLE.omega,
        k=k,
        skip_2b=True,
        skip_3a=True,
        **overrides,
    )
    samples = []

    def collect(results_path):
        samples.extend(extract_triangles(iter_records(results_path, WedgeResultV2), SINGLE))

    WedgeSamplingPipeline(run, EngineConfig(tmp_dir=tmp_path)).run(results_hook=collect)
    return samples


class TestExtract:
    def test_closed_wedges_become_triangles(self):
        results = [
            WedgeResultV2(Sigma.CLOSED, 5, 3, 4, 12, 2, 3, 4),
            WedgeResultV2(Sigma.OPEN, 4, 2, 6, 12, 4, 2, 1),
        ]

        assert extract_triangles(results, SINGLE) == [TriangleSample(3, 4, 5, 2, 3, 4)]

    def test_worked_example_pipeline(self, fig2_path, run_config, tmp_path):
        samples = sampled_triangles(fig2_path, run_config, tmp_path, k=1, exhaustive=True)

        # Each vertex of the one triangle centers one closed wedge.
        assert samples == [TriangleSample(3, 4, 5, 2, 3, 4)] * 3

    def test_rejects_multi_bin_runs(self):
        with pytest.raises(TriStatsError, match="single-bin"):
            extract_triangles([], BinConfig())

    def test_rejects_center_outside_the_bin(self):
        results = [WedgeResultV2(Sigma.CLOSED, 0, 1, 2, 1, 50, 2, 2)]
        with pytest.raises(TriStatsError, match="omega"):
            extract_triangles(results, BinConfig.single_bin(10))


def test_exact_triangles_of_k3():
    graph = Graph.from_edges([(0, 1), (1, 2), (0, 2)])
    assert exact_triangles(graph) == [TriangleSample(0, 1, 2, 2, 2, 2)]


def test_triangle_frequencies():
    counts = triangle_frequencies([sample(2, 3), sample(2, 5)])
    assert counts == {(0, 1, 2): 2}


class TestAssortativityTable:
    def test_quartiles_and_whiskers(self):
        summary = assortativity_table([sample(2, d) for d in (2, 3, 4, 5, 6)])

        assert summary.rows == [AssortativityRow(2, 5, 3.0, 4.0, 5.0, 2.0, 6.0)]
        assert summary.outliers == []

    def test_outliers(self):
        summary = assortativity_table([sample(2, d) for d in (2, 3, 4, 5, 6, 100)])

        (row,) = summary.rows
        assert (row.q25, row.median, row.q75) == pytest.approx((3.25, 4.5, 5.75))
        assert row.hi_whisker == 6.0
        assert summary.outliers == [Outlier(2, 100)]

    def test_groups_by_bin_of_smallest_degree(self):
        samples = [sample(2, 10), sample(3, 20), sample(4, 30), sample(9, 40)]

        summary = assortativity_table(samples)

        assert summary.medians() == {2: 10.0, 3: 25.0, 5: 40.0}

    def test_empty(self):
        with pytest.raises(TriStatsError):
            assortativity_table([])

    def test_write(self, tmp_path):
        summary = assortativity_table([sample(2, d) for d in (2, 3, 4, 5, 6, 100)])

        write_assortativity(summary, tmp_path / "a.csv", tmp_path / "o.csv")

        assert (tmp_path / "a.csv").read_text().splitlines()[0] == (
            "min_bin,count,q25,median,q75,lo_whisker,hi_whisker"
        )
        assert (tmp_path / "o.csv").read_text().splitlines() == ["min_bin,d_max", "2,100"]


def test_community_medians_rise_with_min_degree():
    graph = Graph.from_edges(generate_community(40, 5, 60, 0.8, 50, seed=2))

    medians = assortativity_table(exact_triangles(graph)).medians()

    bins = sorted(medians)
    assert len(bins) >= 3
    assert medians[bins[-1]] > medians[bins[0]]
    rho, _ = stats.spearmanr(bins, [medians[b] for b in bins])
    assert rho > 0.5


@pytest.mark.slow
def test_sampled_community_medians_rise(write_graph, run_config, tmp_path):
    edges = generate_community(40, 5, 60, 0.8, 50, seed=2)
    path = write_graph(edges)

    summary = assortativity_table(sampled_triangles(path, run_config, tmp_path, k=20_000))

    medians = {row.min_bin: row.median for row in summary.rows if row.count >= 20}
    bins = sorted(medians)
    assert len(bins) >= 3
    assert medians[bins[-1]] > medians[bins[0]]
    rho, _ = stats.spearmanr(bins, [medians[b] for b in bins])
    assert rho > 0.5


@pytest.mark.slow
def test_sampled_skg_table_tracks_exhaustive_table(write_graph, run_config, tmp_path):
    edges = list(
        generate_skg(SkgConfig(scale=14, edge_factor=16), seed=5, tmp_dir=tmp_path)
    )
    path = write_graph(edges)
    exact = assortativity_table(exact_triangles(Graph.from_edges(edges))).medians()

    sampled = assortativity_table(
        sampled_triangles(path, run_config, tmp_path, k=60_000)
    )

    compared = [row for row in sampled.rows if row.count >= 40]
    assert len(compared) >= 3
    for row in compared:
        sampled_bin = bin_id(round(row.median), ASSORTATIVITY_BINS)
        exact_bin = bin_id(round(exact[row.min_bin]), ASSORTATIVITY_BINS)
        assert abs(sampled_bin - exact_bin) <= 1, row


@pytest.mark.slow
def test_sampled_triangles_are_uniform(write_graph, run_config, tmp_path):
    edges = generate_community(3, 6, 10, 0.6, 4, seed=1)
    path = write_graph(edges)
    exact = {s.vertices for s in exact_triangles(Graph.from_edges(edges))}

    samples = sampled_triangles(path, run_config, tmp_path, k=40_000)

    counts = triangle_frequencies(samples)
    assert set(counts) == exact
    _, p_value = stats.chisquare([counts[t] for t in sorted(exact)])
    assert p_value > 0.001


def test_k3_single_bin_run(write_graph, run_config, tmp_path):
    path = write_graph(list(combinations(range(3), 2)))

    samples = sampled_triangles(path, run_config, tmp_path, k=30)

    assert len(samples) == 30
    assert {s.vertices for s in samples} == {(0, 1, 2)}
