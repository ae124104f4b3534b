import pytest

from src.wedge_sampler.config import EngineConfig
from src.wedge_sampler.errors import EmptyBinError
from src.wedge_sampler.estimators import (
    SampleBudget,
    achievable_error,
    cc_estimate,
    global_aggregate,
    required_samples,
    summarize_bin,
    triangle_estimate,
)
from src.wedge_sampler.generator import generate_er
from src.wedge_sampler.oracle import Graph, exact_stats
from src.wedge_sampler.pipeline import WedgeSamplingPipeline
from src.wedge_sampler.records import BinSummary


class TestSampleBounds:
    @pytest.mark.parametrize(
        ("eps", "delta", "expected"),
        [(0.05, 0.001, 1521), (0.1, 0.01, 265), (0.99, 0.99, 1)],
    )
    def test_required_samples(self, eps, delta, expected):
        assert required_samples(eps, delta) == expected

    def test_halving_error_quadruples_samples(self):
        k = required_samples(0.02, 0.001)
        assert required_samples(0.01, 0.001) == pytest.approx(4 * k, abs=4)

    def test_achievable_error_inverts_required_samples(self):
        k = required_samples(0.05, 0.001)
        assert achievable_error(k, 0.001) <= 0.05
        assert achievable_error(k - 1, 0.001) > 0.05

    def test_budget_model(self):
        budget = SampleBudget.from_error(0.05, 0.001)
        assert budget.k == 1521

    @pytest.mark.parametrize(("eps", "delta"), [(0, 0.1), (1, 0.1), (0.1, 0), (0.1, 1.5)])
    def test_rejects_out_of_range(self, eps, delta):
        with pytest.raises(ValueError):
            required_samples(eps, delta)

    def test_achievable_error_rejects_zero_samples(self):
        with pytest.raises(ValueError):
            achievable_error(0, 0.1)


class TestBinEstimates:
    def test_cc_estimate(self):
        assert cc_estimate(1, 3) == pytest.approx(1 / 3)
        assert cc_estimate(0, 5) == 0.0
        assert cc_estimate(5, 5) == 1.0

    def test_empty_bin(self):
        with pytest.raises(EmptyBinError):
            cc_estimate(0, 0)
        with pytest.raises(EmptyBinError):
            triangle_estimate(0, 0, 0, 0, 10)

    def test_inconsistent_tallies(self):
        with pytest.raises(ValueError):
            cc_estimate(4, 3)
        with pytest.raises(ValueError):
            triangle_estimate(2, 2, 0, 3, 10)

    def test_triangle_weights(self):
        # A triangle wholly inside the bin is seen from three centers.
        assert triangle_estimate(0, 0, 3, 3, 3) == 1.0
        assert triangle_estimate(0, 2, 0, 9, 9) == 1.0
        assert triangle_estimate(1, 0, 0, 6, 6) == 1.0

    def test_summarize_bin(self):
        summary = summarize_bin(3, 7, 0, 2, 0, 9)
        assert summary == BinSummary(3, 7, 0, 2, 0, 2 / 9, 9, 1.0)


class TestGlobalAggregate:
    def test_worked_example(self):
        summaries = [
            BinSummary(2, 2, 1, 0, 0, 1 / 3, 3, 1.0),
            BinSummary(3, 7, 0, 2, 0, 2 / 9, 9, 1.0),
        ]

        estimate = global_aggregate(summaries, delta=0.01)

        assert estimate.c == pytest.approx(0.25)
        assert estimate.t == pytest.approx(1.0)
        assert estimate.p == 12
        assert estimate.bins == 2
        assert estimate.confidence == pytest.approx(0.98)

    def test_weighted_by_wedges(self):
        summaries = [
            BinSummary(2, 0, 10, 0, 0, 1.0, 10, 10.0),
            BinSummary(5, 10, 0, 0, 0, 0.0, 990, 0.0),
        ]

        estimate = global_aggregate(summaries)

        assert estimate.c == pytest.approx(0.01)
        assert estimate.confidence is None

    def test_confidence_floor(self):
        summaries = [BinSummary(b, 1, 0, 0, 0, 0.0, 1, 0.0) for b in range(2, 30)]
        assert global_aggregate(summaries, delta=0.1).confidence == 0.0

    def test_unsampled_bins_counted_in_wedges(self):
        summaries = [
            BinSummary(2, 2, 1, 0, 0, 1 / 3, 3, 1.0),
            BinSummary(3, 7, 0, 2, 0, 2 / 9, 9, 1.0),
        ]

        estimate = global_aggregate(summaries, wedges_per_bin={2: 3, 3: 9, 7: 6, 8: 0})

        assert estimate.p == 18
        assert estimate.unsampled_wedges == 6
        assert estimate.c == pytest.approx(0.25)
        assert estimate.t == pytest.approx(1.5)
        assert estimate.bins == 2

    def test_fully_sampled_bins(self):
        summaries = [BinSummary(2, 2, 1, 0, 0, 1 / 3, 3, 1.0)]

        estimate = global_aggregate(summaries, wedges_per_bin={2: 3})

        assert estimate.p == 3
        assert estimate.unsampled_wedges == 0

    def test_no_wedges(self):
        with pytest.raises(EmptyBinError, match="no wedges"):
            global_aggregate([])


@pytest.mark.slow
def test_hoeffding_coverage_over_pipeline_runs(write_graph, run_config, tmp_path):
    """Runs whose bins miss the exact value by eps stay within the failure rate."""
    edges = generate_er(200, 900, seed=13)
    path = write_graph(edges)
    eps, delta = 0.1, 0.01
    k = required_samples(eps, delta)
    engine = EngineConfig(tmp_dir=tmp_path, map_workers=1, reduce_workers=1)
    exact = exact_stats(Graph.from_edges(edges), run_config(path).bins)
    runs = 200

    missed_runs = 0
    for seed in range(runs):
        run = run_config(path, k=k, seed=seed, reducers=2, splits=2)
        result = WedgeSamplingPipeline(run, engine).run()
        if any(
            abs(s.c - float(exact.bins[s.b].c)) >= eps for s in result.summaries
        ):
            missed_runs += 1

    assert missed_runs / runs <= 0.05
