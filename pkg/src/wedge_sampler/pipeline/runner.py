"""Runs the eight jobs in order and writes the run's output files."""

import contextlib
import json
import shutil
import tempfile
import time
from collections.abc import Callable, Iterator
from pathlib import Path

import structlog
from pydantic import BaseModel, Field

from ..config.schema import EngineConfig, RunConfig
from ..engine import MapReduceEngine, ShuffleLedger
from ..errors import PhaseError, WedgeSamplerError
from ..estimators import GlobalEstimate, global_aggregate
from ..graph_io import Split, read_edges, read_records, read_splits
from ..records import (
    BinSummary,
    DegreeRecord,
    SampleWedge,
    WedgeCenter,
    WedgeResult,
    WedgeResultV1,
    WedgeResultV2,
    WedgesPerBin,
)
from ..report import bin_report, write_bin_report, write_summary
from .gathers import (
    CenterIndex,
    phase1c_gather,
    phase2b_gather_centers,
    phase3a_gather_hashes,
)
from .phases import (
    PHASE_1A,
    PHASE_1B,
    PHASE_2A,
    PHASE_2C,
    PHASE_3B,
    PHASE_4A,
    PHASE_4B,
    PHASE_4C,
    phase1a_degrees,
    phase1b_wedges_per_bin,
    phase2a_select_centers,
    phase2c_create_wedges,
    phase3b_check_closure,
    phase4a_first_degree,
    phase4b_second_degree,
    phase4c_summarize,
)

logger = structlog.get_logger(__name__)

DEGREES_FILE = "vertex_degrees.tsv"
WEDGES_PER_BIN_FILE = "wedges_per_bin.tsv"
CENTERS_FILE = "wedge_centers.tsv"
SAMPLE_WEDGES_FILE = "sample_wedges.tsv"
RESULTS_V0_FILE = "results_v0.tsv"
RESULTS_V1_FILE = "results_v1.tsv"
RESULTS_V2_FILE = "results_v2.tsv"
SUMMARY_FILE = "summary.tsv"
MANIFEST_FILE = "manifest.json"
TIMINGS_FILE = "timings.json"
BIN_REPORT_FILE = "bins.csv"
INTERMEDIATES_DIR = "intermediates"


class VolumeCheck(BaseModel):
    """Measured shuffle volume of one job next to its predicted value."""

    measured: int
    predicted: int
    exact: bool = Field(description="True if measured must equal predicted")

    @property
    def holds(self) -> bool:
        if self.exact:
            return self.measured == self.predicted
        return self.measured <= self.predicted


class GraphCounts(BaseModel):
    vertices: int = 0
    edges: int = 0
    wedges: int = 0
    centers: int = 0
    sampled_wedges: int = 0
    closed_wedges: int = 0
    closure_hashes: int = 0


class PipelineResult(BaseModel):
    summaries: list[BinSummary]
    wedges_per_bin: list[WedgesPerBin]
    estimate: GlobalEstimate
    counts: GraphCounts
    ledger: ShuffleLedger
    volumes: dict[str, VolumeCheck]
    timings: dict[str, float]
    skipped_2b: bool
    skipped_3a: bool
    out_dir: Path


def predicted_volumes(
    ledger: ShuffleLedger, counts: GraphCounts, *, skipped_2b: bool, skipped_3a: bool
) -> dict[str, VolumeCheck]:
    """Table of shuffle volumes (records entering the shuffle, before any
    combiner) against their closed-form predictions."""
    n, m, q = counts.vertices, counts.edges, counts.sampled_wedges
    measured = {job: stats.pre_combine_records for job, stats in ledger.jobs.items()}
    predicted = {
        PHASE_1A: (2 * m, True),
        PHASE_1B: (n, True),
        PHASE_2A: (counts.centers, True),
        # Without gamma every edge reaches both endpoints.
        PHASE_2C: (counts.centers + 2 * m, skipped_2b),
        # With xi only edges sharing a closure hash with some wedge travel.
        PHASE_3B: ((q + m, True) if skipped_3a else (2 * q, False)),
        PHASE_4A: (n + q, True),
        PHASE_4B: (n + q, True),
        PHASE_4C: (q, True),
    }
    return {
        job: VolumeCheck(measured=measured[job], predicted=value, exact=exact)
        for job, (value, exact) in predicted.items()
        if job in measured
    }


class WedgeSamplingPipeline:
    """Estimates binned and global clustering coefficients of an edge list."""

    def __init__(self, run: RunConfig, engine: EngineConfig | None = None):
        self.run_config = run
        self.engine_config = engine or EngineConfig()
        self.bins = run.bins
        self.timings: dict[str, float] = {}
        self.ledger = ShuffleLedger()

    @contextlib.contextmanager
    def _phase(self, tag: str) -> Iterator[None]:
        started = time.perf_counter()
        try:
            yield
        except PhaseError:
            raise
        except (WedgeSamplerError, ValueError, OSError) as e:
            logger.error("Phase failed", phase=tag, error=str(e))
            raise PhaseError(tag, str(e)) from e
        elapsed = time.perf_counter() - started
        self.timings[tag] = elapsed
        logger.info("Phase complete", phase=tag, seconds=round(elapsed, 3))

    def _splits(self, path: Path, record_type: type) -> list[Split]:
        return read_splits(path, self.run_config.splits, record_type)

    def run(
        self,
        input_path: Path | None = None,
        results_hook: Callable[[Path], None] | None = None,
    ) -> PipelineResult:
        """Run every phase on `input_path` (or the configured input).

        `results_hook` is called with the results ver. 2 file before
        intermediates are cleaned up.
        """
        cfg = self.run_config
        input_path = input_path or cfg.input
        if input_path is None:
            raise ValueError("no input edge list configured")

        out_dir = cfg.out
        out_dir.mkdir(parents=True, exist_ok=True)
        if cfg.keep_intermediates:
            work = out_dir / INTERMEDIATES_DIR
            work.mkdir(parents=True, exist_ok=True)
        else:
            work = Path(tempfile.mkdtemp(prefix="wedges-", dir=self.engine_config.tmp_dir))

        self.timings = {}
        self.ledger = ShuffleLedger()
        engine = MapReduceEngine(
            self.engine_config, seed=cfg.seed, reducer_count=cfg.reducers
        )
        logger.info(
            "Pipeline started",
            input=str(input_path),
            tau=cfg.tau,
            omega=cfg.omega,
            k=cfg.k,
            seed=cfg.seed,
            exhaustive=cfg.exhaustive,
        )
        try:
            result = self._run_phases(engine, Path(input_path), work, results_hook)
        finally:
            if not cfg.keep_intermediates:
                shutil.rmtree(work, ignore_errors=True)
        self._write_outputs(result)
        return result

    def _run_phases(
        self,
        engine: MapReduceEngine,
        input_path: Path,
        work: Path,
        results_hook: Callable[[Path], None] | None,
    ) -> PipelineResult:
        cfg = self.run_config
        limit = self.engine_config.gather_limit
        counts = GraphCounts()

        with self._phase("input"):
            edges = read_edges(
                input_path,
                cfg.splits,
                validate=cfg.validate_input,
                tmp_dir=self.engine_config.tmp_dir,
            )
            counts.edges = sum(len(s) for s in edges)

        with self._phase("1a"):
            job = phase1a_degrees(engine, edges, work / DEGREES_FILE)
            self.ledger.add(job.stats)
            counts.vertices = job.stats.output_records
            degrees = self._splits(work / DEGREES_FILE, DegreeRecord)

        with self._phase("1b"):
            job = phase1b_wedges_per_bin(
                engine, degrees, self.bins, work / WEDGES_PER_BIN_FILE
            )
            self.ledger.add(job.stats)

        with self._phase("1c"):
            wedges_per_bin = read_records(work / WEDGES_PER_BIN_FILE, WedgesPerBin)
            theta = phase1c_gather(wedges_per_bin)
            counts.wedges = sum(theta.values())
            if counts.wedges == 0:
                raise WedgeSamplerError("no wedges: no vertex has degree 2 or more")

        with self._phase("2a"):
            job = phase2a_select_centers(
                engine,
                degrees,
                theta,
                cfg.k,
                self.bins,
                exhaustive=cfg.exhaustive,
                output_path=work / CENTERS_FILE,
            )
            self.ledger.add(job.stats)
            counts.centers = job.stats.output_records
            counts.sampled_wedges = job.stats.counters.get("sampled_wedges", 0)
            centers = self._splits(work / CENTERS_FILE, WedgeCenter)

        with self._phase("2b"):
            if cfg.skip_2b:
                gamma = CenterIndex.skipped()
            else:
                gamma = phase2b_gather_centers(
                    (r for s in centers for r in s), self.bins, limit
                )

        with self._phase("2c"):
            job = phase2c_create_wedges(
                engine,
                edges,
                centers,
                gamma,
                self.bins,
                cfg.k,
                exhaustive=cfg.exhaustive,
                output_path=work / SAMPLE_WEDGES_FILE,
            )
            self.ledger.add(job.stats)
            wedges = self._splits(work / SAMPLE_WEDGES_FILE, SampleWedge)

        with self._phase("3a"):
            if cfg.skip_3a:
                xi: frozenset[int] = frozenset()
            else:
                xi = phase3a_gather_hashes((r for s in wedges for r in s), limit)
            counts.closure_hashes = len(xi)

        with self._phase("3b"):
            job = phase3b_check_closure(
                engine, wedges, edges, xi, work / RESULTS_V0_FILE
            )
            self.ledger.add(job.stats)
            counts.closed_wedges = job.stats.counters.get("closed_wedges", 0)
            results = self._splits(work / RESULTS_V0_FILE, WedgeResult)

        with self._phase("4a"):
            job = phase4a_first_degree(
                engine, results, degrees, work / RESULTS_V1_FILE
            )
            self.ledger.add(job.stats)
            results = self._splits(work / RESULTS_V1_FILE, WedgeResultV1)

        with self._phase("4b"):
            job = phase4b_second_degree(
                engine, results, degrees, work / RESULTS_V2_FILE
            )
            self.ledger.add(job.stats)
            results = self._splits(work / RESULTS_V2_FILE, WedgeResultV2)

        with self._phase("4c"):
            job = phase4c_summarize(engine, results, self.bins)
            self.ledger.add(job.stats)
            assert job.records is not None
            summaries = sorted(job.records)

        with self._phase("aggregate"):
            estimate = global_aggregate(
                summaries, cfg.delta, {w.b: w.p for w in wedges_per_bin}
            )
            if results_hook is not None:
                results_hook(work / RESULTS_V2_FILE)

        skipped_2b = gamma.is_skipped
        skipped_3a = not xi
        return PipelineResult(
            summaries=summaries,
            wedges_per_bin=wedges_per_bin,
            estimate=estimate,
            counts=counts,
            ledger=self.ledger,
            volumes=predicted_volumes(
                self.ledger, counts, skipped_2b=skipped_2b, skipped_3a=skipped_3a
            ),
            timings=dict(self.timings),
            skipped_2b=skipped_2b,
            skipped_3a=skipped_3a,
            out_dir=cfg.out,
        )

    def _write_outputs(self, result: PipelineResult) -> None:
        cfg = self.run_config
        out = cfg.out
        write_summary(
            out / SUMMARY_FILE, result.summaries, self.bins, k=cfg.k, seed=cfg.seed
        )
        write_bin_report(
            out / BIN_REPORT_FILE,
            bin_report(result.wedges_per_bin, result.summaries, self.bins),
        )
        manifest = {
            "config": cfg.model_dump(mode="json"),
            "engine": self.engine_config.model_dump(
                mode="json", exclude={"tmp_dir", "map_workers", "reduce_workers"}
            ),
            "counts": result.counts.model_dump(),
            "skipped": {"2b": result.skipped_2b, "3a": result.skipped_3a},
            "estimate": result.estimate.model_dump(),
            "jobs": result.ledger.to_dict(),
            "volumes": {
                job: {**check.model_dump(), "holds": check.holds}
                for job, check in result.volumes.items()
            },
        }
        with open(out / MANIFEST_FILE, "w") as f:
            json.dump(manifest, f, indent=2, sort_keys=True)
            f.write("\n")
        with open(out / TIMINGS_FILE, "w") as f:
            json.dump(result.timings, f, indent=2)
            f.write("\n")
        logger.info(
            "Pipeline finished",
            c=result.estimate.c,
            t=result.estimate.t,
            bins=len(result.summaries),
            out=str(out),
        )
