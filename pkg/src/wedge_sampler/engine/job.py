"""Local map-shuffle-reduce execution.

Mappers run per split, reducers per partition, each stage on a thread pool,
with a barrier between the two. A job may read several inputs, each with its
own map function, the way the closure and join jobs read a phase file next
to the edge list or degree file.
"""

import shutil
import tempfile
from collections.abc import Callable, Iterator, Sequence
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np
import structlog

from ..config.schema import EngineConfig
from ..errors import ReducerBudgetExceeded
from ..graph_io import Split
from ..records import format_record
from .records import ShuffleStats
from .rng import derive_rng, key_rng
from .shuffle import MapOutputBuffer, Run, group_by_key, merge_runs

logger = structlog.get_logger(__name__)

MapFn = Callable[[Any, "MapContext"], None]
ReduceFn = Callable[[bytes, Iterator[tuple[bytes, bytes]], "ReduceContext"], None]
Combiner = Callable[[bytes, bytes], bytes]


class JobInput:
    def __init__(self, splits: Sequence[Split], mapper: MapFn):
        self.splits = splits
        self.mapper = mapper


class Job:
    def __init__(
        self,
        job_id: str,
        inputs: Sequence[JobInput],
        reducer: ReduceFn,
        combiner: Combiner | None = None,
    ):
        self.job_id = job_id
        self.inputs = list(inputs)
        self.reducer = reducer
        self.combiner = combiner


class MapContext:
    """Handed to a map function with every record of one split."""

    def __init__(self, job_id: str, seed: int, split_index: int, buffer: MapOutputBuffer):
        self.job_id = job_id
        self.seed = seed
        self.split_index = split_index
        self._buffer = buffer
        self._rng: np.random.Generator | None = None
        self.counters: dict[str, int] = {}

    @property
    def rng(self) -> np.random.Generator:
        if self._rng is None:
            self._rng = derive_rng(self.seed, self.job_id, self.split_index)
        return self._rng

    def emit(self, key: bytes, value: bytes, secondary: bytes = b"") -> None:
        self._buffer.emit(key, value, secondary)

    def count(self, name: str, amount: int = 1) -> None:
        self.counters[name] = self.counters.get(name, 0) + amount


class ReduceContext:
    """Handed to a reduce function with every key group of one partition."""

    def __init__(self, job_id: str, seed: int, partition: int):
        self.job_id = job_id
        self.seed = seed
        self.partition = partition
        self.output: list[Any] = []
        self.counters: dict[str, int] = {}

    def key_rng(self, key: int) -> np.random.Generator:
        return key_rng(self.seed, self.job_id, key)

    def emit(self, record: Any) -> None:
        self.output.append(record)

    def count(self, name: str, amount: int = 1) -> None:
        self.counters[name] = self.counters.get(name, 0) + amount


class JobResult:
    def __init__(
        self,
        stats: ShuffleStats,
        records: list[Any] | None = None,
        output_path: Path | None = None,
    ):
        self.stats = stats
        self.records = records
        self.output_path = output_path


def _budgeted(
    values: Iterator[tuple[bytes, bytes]], job_id: str, key: bytes, budget: int | None
) -> Iterator[tuple[bytes, bytes]]:
    if budget is None:
        yield from values
        return
    for seen, item in enumerate(values, start=1):
        if seen > budget:
            raise ReducerBudgetExceeded(job_id, key, budget)
        yield item


class MapReduceEngine:
    def __init__(self, config: EngineConfig, *, seed: int, reducer_count: int):
        if reducer_count < 1:
            raise ValueError("reducer_count must be positive")
        self.config = config
        self.seed = seed
        self.reducer_count = reducer_count

    def run(self, job: Job, output_path: Path | None = None) -> JobResult:
        """Run `job`; reducer output goes to `output_path` or stays in memory."""
        stats = ShuffleStats(job_id=job.job_id)
        spill_dir = Path(
            tempfile.mkdtemp(prefix=f"{job.job_id}-", dir=self.config.tmp_dir)
        )
        logger.debug("Job started", job=job.job_id, reducers=self.reducer_count)
        try:
            partition_runs = self._map_stage(job, spill_dir, stats)
            records = self._reduce_stage(
                job, partition_runs, spill_dir, stats, output_path
            )
        finally:
            shutil.rmtree(spill_dir, ignore_errors=True)

        logger.info(
            "Job finished",
            job=job.job_id,
            input_records=stats.map_input_records,
            records_emitted=stats.records_emitted,
            bytes_emitted=stats.bytes_emitted,
            output_records=stats.output_records,
            spilled_runs=stats.spilled_runs,
        )
        return JobResult(stats, records=records, output_path=output_path)

    def _map_stage(
        self, job: Job, spill_dir: Path, stats: ShuffleStats
    ) -> list[list[Run]]:
        # Split indices are numbered across all inputs of the job.
        tasks: list[tuple[int, Split, MapFn]] = []
        for job_input in job.inputs:
            for split in job_input.splits:
                tasks.append((len(tasks), split, job_input.mapper))

        def run_mapper(
            task: tuple[int, Split, MapFn],
        ) -> tuple[MapOutputBuffer, MapContext, int, list[list[Run]]]:
            split_index, split, mapper = task
            buffer = MapOutputBuffer(
                split_index,
                self.reducer_count,
                self.config.spill_records,
                spill_dir,
                combiner=job.combiner,
            )
            context = MapContext(job.job_id, self.seed, split_index, buffer)
            consumed = 0
            for record in split:
                mapper(record, context)
                consumed += 1
            return buffer, context, consumed, buffer.close()

        with ThreadPoolExecutor(max_workers=self.config.map_workers) as pool:
            finished = list(pool.map(run_mapper, tasks))

        partition_runs: list[list[Run]] = [[] for _ in range(self.reducer_count)]
        for buffer, context, consumed, runs_by_partition in finished:
            stats.map_input_records += consumed
            stats.pre_combine_records += buffer.pre_combine_records
            stats.records_emitted += buffer.records_emitted
            stats.bytes_emitted += buffer.bytes_emitted
            stats.spilled_runs += buffer.spilled_runs
            stats.merge_counters(context.counters)
            for partition, runs in enumerate(runs_by_partition):
                partition_runs[partition].extend(runs)
        return partition_runs

    def _reduce_stage(
        self,
        job: Job,
        partition_runs: list[list[Run]],
        spill_dir: Path,
        stats: ShuffleStats,
        output_path: Path | None,
    ) -> list[Any] | None:
        budget = self.config.max_values_per_key

        def run_reducer(partition: int) -> tuple[ReduceContext, int, int, Path | None]:
            context = ReduceContext(job.job_id, self.seed, partition)
            groups = 0
            written = 0
            runs = partition_runs[partition]
            part_path = None
            if output_path is not None:
                part_path = spill_dir / f"part-{partition:05d}"
                part_path.touch()
            if runs:
                entries = merge_runs(runs, self.config.merge_fan_in, spill_dir)
                for key, values in group_by_key(entries):
                    groups += 1
                    job.reducer(key, _budgeted(values, job.job_id, key, budget), context)
                    if (
                        part_path is not None
                        and len(context.output) >= self.config.spill_records
                    ):
                        written += _append_records(part_path, context.output)
                        context.output.clear()
            if part_path is not None:
                written += _append_records(part_path, context.output)
                context.output.clear()
            else:
                written = len(context.output)
            return context, groups, written, part_path

        with ThreadPoolExecutor(max_workers=self.config.reduce_workers) as pool:
            finished = list(pool.map(run_reducer, range(self.reducer_count)))

        records: list[Any] | None = [] if output_path is None else None
        for context, groups, written, _ in finished:
            stats.reduce_groups += groups
            stats.output_records += written
            stats.merge_counters(context.counters)
            if records is not None:
                records.extend(context.output)

        if output_path is not None:
            output_path.parent.mkdir(parents=True, exist_ok=True)
            with open(output_path, "wb") as out:
                for _, _, _, part_path in finished:
                    assert part_path is not None
                    with open(part_path, "rb") as part:
                        shutil.copyfileobj(part, out)
        return records


def _append_records(path: Path, records: list[Any]) -> int:
    with open(path, "a") as f:
        for record in records:
            f.write(format_record(record))
            f.write("\n")
    return len(records)


def run_job(
    splits: Sequence[Split],
    map_fn: MapFn,
    reduce_fn: ReduceFn,
    reducer_count: int,
    seed: int,
    *,
    job_id: str = "job",
    combiner: Combiner | None = None,
    config: EngineConfig | None = None,
) -> tuple[list[Any], ShuffleStats]:
    """Single-input job with in-memory output."""
    engine = MapReduceEngine(
        config or EngineConfig(), seed=seed, reducer_count=reducer_count
    )
    result = engine.run(Job(job_id, [JobInput(splits, map_fn)], reduce_fn, combiner))
    assert result.records is not None
    return result.records, result.stats
