"""The map-shuffle-reduce jobs of the wedge-sampling pipeline.

Each phase builds one engine job. Keys are big-endian u64 so reducers see
vertices, bins and hashes in numeric order. Secondary key FIRST puts a
vertex's own record (center or degree) ahead of the records joined to it.
"""

import itertools
from collections.abc import Iterator, Sequence
from pathlib import Path

from ..binning import bin_id, bin_lo_deg
from ..config.schema import BinConfig
from ..engine import (
    FIRST,
    Job,
    JobInput,
    JobResult,
    MapContext,
    MapReduceEngine,
    ReduceContext,
    decode_ints,
    encode_fields,
    pack_u64,
    unpack_u64,
)
from ..errors import MissingDegreeError, UnderDeliveryError, WedgeSamplerError
from ..estimators import summarize_bin
from ..graph_io import Split, split_records
from ..records import (
    DegreeRecord,
    Edge,
    SampleWedge,
    Sigma,
    WedgeCenter,
    WedgeResult,
    WedgeResultV1,
    WedgeResultV2,
    WedgesPerBin,
    format_record,
    parse_record,
)
from .gathers import CenterIndex
from .hashing import edge_hash, edge_sort_key, keeps_edge
from .sampling import exhaustive_pairs, round_budget, sampling_subroutine, wedge_count

Values = Iterator[tuple[bytes, bytes]]

JOINED = pack_u64(1)

PHASE_1A = "phase1a"
PHASE_1B = "phase1b"
PHASE_2A = "phase2a"
PHASE_2C = "phase2c"
PHASE_3B = "phase3b"
PHASE_4A = "phase4a"
PHASE_4B = "phase4b"
PHASE_4C = "phase4c"


def _sum_fields(a: bytes, b: bytes) -> bytes:
    return encode_fields(*(x + y for x, y in zip(decode_ints(a), decode_ints(b))))


def phase1a_degrees(
    engine: MapReduceEngine, edges: Sequence[Split], output_path: Path | None = None
) -> JobResult:
    """Degree of every vertex; each edge emits one count per endpoint."""
    one = b"1"

    def map_edge(edge: Edge, ctx: MapContext) -> None:
        ctx.emit(pack_u64(edge.v), one)
        ctx.emit(pack_u64(edge.w), one)

    def reduce_degree(key: bytes, values: Values, ctx: ReduceContext) -> None:
        ctx.emit(DegreeRecord(unpack_u64(key), sum(int(v) for _, v in values)))

    job = Job(PHASE_1A, [JobInput(edges, map_edge)], reduce_degree, _sum_fields)
    return engine.run(job, output_path)


def phase1b_wedges_per_bin(
    engine: MapReduceEngine,
    degrees: Sequence[Split],
    cfg: BinConfig,
    output_path: Path | None = None,
) -> JobResult:
    """Vertex count and wedge count of every populated bin."""

    def map_degree(record: DegreeRecord, ctx: MapContext) -> None:
        ctx.emit(
            pack_u64(bin_id(record.d, cfg)), encode_fields(1, wedge_count(record.d))
        )

    def reduce_bin(key: bytes, values: Values, ctx: ReduceContext) -> None:
        n = p = 0
        for _, value in values:
            dn, dp = decode_ints(value)
            n += dn
            p += dp
        ctx.emit(WedgesPerBin(unpack_u64(key), n, p))

    job = Job(PHASE_1B, [JobInput(degrees, map_degree)], reduce_bin, _sum_fields)
    return engine.run(job, output_path)


def phase2a_select_centers(
    engine: MapReduceEngine,
    degrees: Sequence[Split],
    theta: dict[int, int],
    k: int,
    cfg: BinConfig,
    *,
    exhaustive: bool = False,
    output_path: Path | None = None,
) -> JobResult:
    """Sample budget q of every vertex; vertices drawing q = 0 are dropped."""

    def map_degree(record: DegreeRecord, ctx: MapContext) -> None:
        v, d = record
        if d < 2:
            return
        b = bin_id(d, cfg)
        theta_b = theta.get(b)
        if not theta_b:
            raise WedgeSamplerError(
                f"wedges per bin has no entry for bin {b} (vertex {v}, degree {d})"
            )
        q = wedge_count(d) if exhaustive else round_budget(d, k, theta_b, ctx.rng)
        if q:
            ctx.emit(pack_u64(v), encode_fields(d, q, theta_b))

    def reduce_center(key: bytes, values: Values, ctx: ReduceContext) -> None:
        v = unpack_u64(key)
        for _, value in values:
            d, q, p = decode_ints(value)
            ctx.emit(WedgeCenter(v, d, q, p))
            ctx.count("sampled_wedges", q)

    job = Job(PHASE_2A, [JobInput(degrees, map_degree)], reduce_center)
    return engine.run(job, output_path)


def phase2c_create_wedges(
    engine: MapReduceEngine,
    edges: Sequence[Split],
    centers: Sequence[Split],
    gamma: CenterIndex,
    cfg: BinConfig,
    k: int,
    *,
    exhaustive: bool = False,
    output_path: Path | None = None,
) -> JobResult:
    """Sample wedges at every center from its first d' randomly ordered edges."""
    seed = engine.seed

    def map_center(center: WedgeCenter, ctx: MapContext) -> None:
        ctx.emit(pack_u64(center.v), encode_fields(center.d, center.q, center.p), FIRST)

    def map_edge(edge: Edge, ctx: MapContext) -> None:
        for center, neighbor in ((edge.v, edge.w), (edge.w, edge.v)):
            g = gamma(center)
            if g == 1:
                continue
            y = edge_sort_key(seed, center, neighbor)
            if g >= 2 and not exhaustive and not keeps_edge(y, k, bin_lo_deg(g, cfg)):
                continue
            ctx.emit(pack_u64(center), encode_fields(neighbor), pack_u64(y))

    def reduce_center(key: bytes, values: Values, ctx: ReduceContext) -> None:
        secondary, value = next(values)
        if secondary != FIRST:
            # Edges of a vertex that is not a center, forwarded while gamma is skipped.
            return
        v = unpack_u64(key)
        d, q, p = decode_ints(value)
        if exhaustive:
            needed, pairs = exhaustive_pairs(d)
        else:
            needed, pairs = sampling_subroutine(d, q, ctx.key_rng(v))
        neighbors = [int(w) for _, w in itertools.islice(values, needed)]
        if len(neighbors) < needed:
            raise UnderDeliveryError(v, len(neighbors), needed)
        for i, j in pairs.tolist():
            v1 = neighbors[i - 1]
            v2 = neighbors[j - 1]
            ctx.emit(SampleWedge(edge_hash(v1, v2), v, v1, v2, p, d))

    job = Job(
        PHASE_2C,
        [JobInput(centers, map_center), JobInput(edges, map_edge)],
        reduce_center,
    )
    return engine.run(job, output_path)


def phase3b_check_closure(
    engine: MapReduceEngine,
    wedges: Sequence[Split],
    edges: Sequence[Split],
    xi: frozenset[int],
    output_path: Path | None = None,
) -> JobResult:
    """Label every sample wedge open or closed.

    Wedges and edges meet under the closure hash. Colliding hashes are
    resolved by comparing endpoints.
    """

    def map_wedge(wedge: SampleWedge, ctx: MapContext) -> None:
        ctx.emit(pack_u64(wedge.h), format_record(wedge).encode(), JOINED)

    def map_edge(edge: Edge, ctx: MapContext) -> None:
        h = edge_hash(edge.v, edge.w)
        if xi and h not in xi:
            return
        ctx.emit(pack_u64(h), encode_fields(edge.v, edge.w), FIRST)

    def reduce_hash(key: bytes, values: Values, ctx: ReduceContext) -> None:
        present: set[tuple[int, int]] = set()
        for secondary, value in values:
            if secondary == FIRST:
                a, b = decode_ints(value)
                present.add((a, b) if a < b else (b, a))
                continue
            w = parse_record(SampleWedge, value.decode())
            pair = (w.v1, w.v2) if w.v1 < w.v2 else (w.v2, w.v1)
            sigma = Sigma.CLOSED if pair in present else Sigma.OPEN
            if sigma is Sigma.CLOSED:
                ctx.count("closed_wedges")
            ctx.emit(WedgeResult(sigma, w.v0, w.v1, w.v2, w.p, w.d0))

    job = Job(
        PHASE_3B,
        [JobInput(wedges, map_wedge), JobInput(edges, map_edge)],
        reduce_hash,
    )
    return engine.run(job, output_path)


def _join_degree(
    engine: MapReduceEngine,
    job_id: str,
    results: Sequence[Split],
    degrees: Sequence[Split],
    result_type: type,
    joined_type: type,
    endpoint: str,
    output_path: Path | None,
) -> JobResult:
    def map_degree(record: DegreeRecord, ctx: MapContext) -> None:
        ctx.emit(pack_u64(record.v), encode_fields(record.d), FIRST)

    def map_result(record: tuple, ctx: MapContext) -> None:
        ctx.emit(
            pack_u64(getattr(record, endpoint)), format_record(record).encode(), JOINED
        )

    def reduce_vertex(key: bytes, values: Values, ctx: ReduceContext) -> None:
        degree: int | None = None
        for secondary, value in values:
            if secondary == FIRST:
                degree = int(value)
                continue
            if degree is None:
                raise MissingDegreeError(unpack_u64(key))
            ctx.emit(joined_type(*parse_record(result_type, value.decode()), degree))

    job = Job(
        job_id,
        [JobInput(degrees, map_degree), JobInput(results, map_result)],
        reduce_vertex,
    )
    return engine.run(job, output_path)


def phase4a_first_degree(
    engine: MapReduceEngine,
    results: Sequence[Split],
    degrees: Sequence[Split],
    output_path: Path | None = None,
) -> JobResult:
    """Results ver. 0 -> ver. 1: attach the degree of v1."""
    return _join_degree(
        engine, PHASE_4A, results, degrees, WedgeResult, WedgeResultV1, "v1", output_path
    )


def phase4b_second_degree(
    engine: MapReduceEngine,
    results: Sequence[Split],
    degrees: Sequence[Split],
    output_path: Path | None = None,
) -> JobResult:
    """Results ver. 1 -> ver. 2: attach the degree of v2."""
    return _join_degree(
        engine,
        PHASE_4B,
        results,
        degrees,
        WedgeResultV1,
        WedgeResultV2,
        "v2",
        output_path,
    )


def phase4ab_join_endpoint_degrees(
    engine: MapReduceEngine,
    results: Sequence[Split],
    degrees: Sequence[Split],
    split_count: int,
) -> tuple[list[WedgeResultV2], JobResult, JobResult]:
    """Both joins in memory, for callers that do not persist results ver. 1."""
    first = phase4a_first_degree(engine, results, degrees)
    assert first.records is not None
    second = phase4b_second_degree(
        engine, split_records(first.records, split_count), degrees
    )
    assert second.records is not None
    return second.records, first, second


def phase4c_summarize(
    engine: MapReduceEngine,
    results: Sequence[Split],
    cfg: BinConfig,
    output_path: Path | None = None,
) -> JobResult:
    """Per center bin: tallies q0..q3 and the clustering and triangle estimates.

    A closed wedge counts toward q1, q2 or q3 by how many of its vertices share
    the center's bin.
    """

    def map_result(record: WedgeResultV2, ctx: MapContext) -> None:
        b0 = bin_id(record.d0, cfg)
        tallies = [0, 0, 0, 0]
        if record.sigma is Sigma.CLOSED:
            slot = 1 + (bin_id(record.d1, cfg) == b0) + (bin_id(record.d2, cfg) == b0)
        else:
            slot = 0
        tallies[slot] = 1
        ctx.emit(pack_u64(b0), encode_fields(*tallies, record.p))

    def combine(a: bytes, b: bytes) -> bytes:
        left = decode_ints(a)
        right = decode_ints(b)
        return encode_fields(*(x + y for x, y in zip(left[:4], right[:4])), left[4])

    def reduce_bin(key: bytes, values: Values, ctx: ReduceContext) -> None:
        q = [0, 0, 0, 0]
        p = 0
        for _, value in values:
            fields = decode_ints(value)
            for i in range(4):
                q[i] += fields[i]
            p = fields[4]
        ctx.emit(summarize_bin(unpack_u64(key), *q, p))

    job = Job(PHASE_4C, [JobInput(results, map_result)], reduce_bin, combine)
    return engine.run(job, output_path)
