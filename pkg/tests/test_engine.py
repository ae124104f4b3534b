import numpy as np
import pytest

from src.wedge_sampler.config import EngineConfig
from src.wedge_sampler.engine import (
    FIRST,
    Job,
    JobInput,
    MapReduceEngine,
    ShuffleLedger,
    decode_ints,
    derive_rng,
    encode_fields,
    key_rng,
    pack_u64,
    run_job,
    unpack_u64,
)
from src.wedge_sampler.errors import ReducerBudgetExceeded
from src.wedge_sampler.graph_io import read_records, split_records
from src.wedge_sampler.records import DegreeRecord


def map_degree(edge, ctx):
    ctx.emit(pack_u64(edge.v), b"1")
    ctx.emit(pack_u64(edge.w), b"1")


def reduce_degree(key, values, ctx):
    ctx.emit(DegreeRecord(unpack_u64(key), sum(int(v) for _, v in values)))


def add_counts(a, b):
    return encode_fields(*(x + y for x, y in zip(decode_ints(a), decode_ints(b))))


class TestRunJob:
    def test_degree_count(self, fig2_edges, fig2_degrees, small_engine_config):
        records, stats = run_job(
            split_records(fig2_edges, 3),
            map_degree,
            reduce_degree,
            reducer_count=3,
            seed=1,
            config=small_engine_config,
        )

        assert {r.v: r.d for r in records} == fig2_degrees
        assert stats.map_input_records == 7
        assert stats.records_emitted == 14
        assert stats.pre_combine_records == 14
        assert stats.reduce_groups == 6
        assert stats.output_records == 6

    def test_combiner_shrinks_shuffle(self, fig2_edges, fig2_degrees):
        records, stats = run_job(
            split_records(fig2_edges, 1),
            map_degree,
            reduce_degree,
            reducer_count=2,
            seed=1,
            combiner=add_counts,
        )

        assert {r.v: r.d for r in records} == fig2_degrees
        assert stats.pre_combine_records == 14
        assert stats.records_emitted == 6

    def test_empty_input(self):
        records, stats = run_job(
            split_records([], 4), map_degree, reduce_degree, reducer_count=3, seed=1
        )

        assert records == []
        assert stats.records_emitted == 0
        assert stats.reduce_groups == 0

    def test_every_record_reaches_one_reducer(self, small_engine_config):
        emitted = list(range(200))

        def map_value(x, ctx):
            ctx.emit(pack_u64(x % 17), pack_u64(x))

        def collect(key, values, ctx):
            for _, value in values:
                ctx.emit((unpack_u64(key), unpack_u64(value)))

        records, stats = run_job(
            split_records(emitted, 7),
            map_value,
            collect,
            reducer_count=5,
            seed=0,
            config=small_engine_config,
        )

        assert sorted(v for _, v in records) == emitted
        assert all(v % 17 == k for k, v in records)
        assert stats.spilled_runs > 0


def test_secondary_keys_order_values(small_engine_config):
    def map_pair(item, ctx):
        key, secondary, value = item
        ctx.emit(pack_u64(key), value, secondary)

    def reduce_pair(key, values, ctx):
        ctx.emit((unpack_u64(key), [v for _, v in values]))

    items = [
        (1, pack_u64(1), b"wedge-a"),
        (1, FIRST, b"center"),
        (2, pack_u64(1), b"wedge-b"),
        (1, pack_u64(1), b"wedge-c"),
        (2, FIRST, b"center"),
    ]
    records, _ = run_job(
        split_records(items, 3),
        map_pair,
        reduce_pair,
        reducer_count=2,
        seed=0,
        config=small_engine_config,
    )
    seen = dict(records)

    assert seen[1][0] == b"center"
    assert sorted(seen[1][1:]) == [b"wedge-a", b"wedge-c"]
    assert seen[2] == [b"center", b"wedge-b"]


def test_results_independent_of_workers_and_spills(tmp_path):
    edges = [(v, (v * 37 + 11) % 97) for v in range(97)]

    def map_draw(edge, ctx):
        ctx.emit(pack_u64(edge[0] % 10), pack_u64(int(ctx.rng.integers(1 << 62))))

    def reduce_draw(key, values, ctx):
        k = unpack_u64(key)
        draw = int(ctx.key_rng(k).integers(1 << 30))
        ctx.emit((k, sorted(unpack_u64(v) for _, v in values), draw))

    def run(config):
        records, _ = run_job(
            split_records(edges, 4), map_draw, reduce_draw, 3, seed=5, config=config
        )
        return sorted(records)

    baseline = run(EngineConfig(tmp_dir=tmp_path))
    single = EngineConfig(map_workers=1, reduce_workers=1, tmp_dir=tmp_path)
    assert run(single) == baseline
    assert (
        run(
            EngineConfig(
                spill_records=2, merge_fan_in=2, map_workers=3, tmp_dir=tmp_path
            )
        )
        == baseline
    )


def test_reducer_budget(small_engine_config):
    config = small_engine_config.model_copy(update={"max_values_per_key": 3})

    def map_constant(x, ctx):
        ctx.emit(b"hot", pack_u64(x))

    def drain(key, values, ctx):
        for _ in values:
            pass

    with pytest.raises(ReducerBudgetExceeded) as exc_info:
        run_job(
            split_records(list(range(5)), 2), map_constant, drain, 2, 0, config=config
        )

    assert exc_info.value.budget == 3


def test_multi_input_job_writes_output_file(engine, tmp_path, fig2_edges):
    degrees = [DegreeRecord(1, 2), DegreeRecord(6, 1)]

    def map_edge_ends(edge, ctx):
        ctx.emit(pack_u64(edge.v), b"", pack_u64(1))
        ctx.emit(pack_u64(edge.w), b"", pack_u64(1))

    def map_degree_record(record, ctx):
        ctx.emit(pack_u64(record.v), pack_u64(record.d), FIRST)

    def reduce_join(key, values, ctx):
        values = list(values)
        if values[0][0] == FIRST:
            ctx.emit(DegreeRecord(unpack_u64(key), unpack_u64(values[0][1])))
            ctx.count("joined")

    job = Job(
        "join",
        [
            JobInput(split_records(fig2_edges, 2), map_edge_ends),
            JobInput(split_records(degrees, 1), map_degree_record),
        ],
        reduce_join,
    )
    output = tmp_path / "joined.tsv"

    result = engine.run(job, output)

    assert result.records is None
    assert result.output_path == output
    assert sorted(read_records(output, DegreeRecord)) == degrees
    assert result.stats.output_records == 2
    assert result.stats.counters == {"joined": 2}
    assert result.stats.map_input_records == 9


def test_engine_rejects_zero_reducers():
    with pytest.raises(ValueError):
        MapReduceEngine(EngineConfig(), seed=0, reducer_count=0)


def test_ledger_totals():
    def map_one(x, ctx):
        ctx.emit(b"k", b"v" * x)

    def ignore(key, values, ctx):
        pass

    _, first = run_job(split_records([1, 1], 1), map_one, ignore, 1, 0, job_id="a")
    _, second = run_job(split_records([2], 1), map_one, ignore, 1, 0, job_id="b")
    ledger = ShuffleLedger()
    ledger.add(first)
    ledger.add(second)

    assert ledger.records_emitted == 3
    assert ledger.bytes_emitted == 2 * 2 + 3
    assert set(ledger.to_dict()) == {"a", "b"}


class TestRng:
    def test_streams_are_reproducible(self):
        a = derive_rng(3, "phase2a", 0).integers(1 << 62, size=4)
        b = derive_rng(3, "phase2a", 0).integers(1 << 62, size=4)
        assert np.array_equal(a, b)

    def test_streams_are_distinct(self):
        draws = {
            tuple(derive_rng(seed, job, split).integers(1 << 62, size=2).tolist())
            for seed in (0, 1)
            for job in ("phase2a", "phase2c")
            for split in (0, 1)
        }
        assert len(draws) == 8

    def test_key_stream_differs_from_split_stream(self):
        split = derive_rng(0, "job", 4).integers(1 << 62)
        key = key_rng(0, "job", 4).integers(1 << 62)
        assert split != key



@pytest.mark.parametrize("value", [-1, 2**64])
def test_pack_u64_range(value):
    with pytest.raises(ValueError, match="unsigned 64-bit"):
        pack_u64(value)
    assert unpack_u64(pack_u64(2**64 - 1)) == 2**64 - 1
