from .job import (
    Job,
    JobInput,
    JobResult,
    MapContext,
    MapReduceEngine,
    ReduceContext,
    run_job,
)
from .records import (
    FIRST,
    KVRecord,
    ShuffleLedger,
    ShuffleStats,
    decode_ints,
    encode_fields,
    pack_u64,
    unpack_u64,
)
from .rng import derive_rng, fmix64, key_rng, stable_hash64

__all__ = [
    "FIRST",
    "Job",
    "JobInput",
    "JobResult",
    "KVRecord",
    "MapContext",
    "MapReduceEngine",
    "ReduceContext",
    "ShuffleLedger",
    "ShuffleStats",
    "decode_ints",
    "derive_rng",
    "encode_fields",
    "fmix64",
    "key_rng",
    "pack_u64",
    "run_job",
    "stable_hash64",
    "unpack_u64",
]
