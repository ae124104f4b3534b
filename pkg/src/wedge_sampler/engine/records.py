import struct
from typing import NamedTuple

from pydantic import BaseModel, Field

_U64 = struct.Struct(">Q")

# Secondary key placing a record ahead of everything else under its key.
FIRST = b"\x00" * 8


class KVRecord(NamedTuple):
    """One shuffled record. Reducers group by `key` and see values ordered by
    `secondary` (ascending, bytewise)."""

    key: bytes
    secondary: bytes
    value: bytes

    @property
    def size(self) -> int:
        return len(self.key) + len(self.secondary) + len(self.value)


def pack_u64(x: int) -> bytes:
    """Big-endian so that bytewise order equals numeric order."""
    try:
        return _U64.pack(x)
    except struct.error as e:
        raise ValueError(f"{x} is not an unsigned 64-bit value") from e


def unpack_u64(data: bytes) -> int:
    return _U64.unpack(data)[0]


def encode_fields(*fields: object) -> bytes:
    return "\t".join(str(f) for f in fields).encode()


def decode_ints(value: bytes) -> list[int]:
    return [int(f) for f in value.split(b"\t")]


class ShuffleStats(BaseModel):
    """Exact record and byte counts for one job."""

    job_id: str
    map_input_records: int = 0
    pre_combine_records: int = Field(
        default=0, description="Records emitted by mappers before the combiner"
    )
    records_emitted: int = Field(
        default=0, description="Records entering the shuffle"
    )
    bytes_emitted: int = 0
    reduce_groups: int = 0
    output_records: int = 0
    spilled_runs: int = 0
    counters: dict[str, int] = Field(default_factory=dict)

    def merge_counters(self, counters: dict[str, int]) -> None:
        for name, value in counters.items():
            self.counters[name] = self.counters.get(name, 0) + value

    def to_dict(self) -> dict:
        return self.model_dump(mode="json")


class ShuffleLedger(BaseModel):
    """Per-job breakdown of a multi-job run."""

    jobs: dict[str, ShuffleStats] = Field(default_factory=dict)

    def add(self, stats: ShuffleStats) -> None:
        self.jobs[stats.job_id] = stats

    def to_dict(self) -> dict:
        return {job_id: stats.to_dict() for job_id, stats in self.jobs.items()}

    @property
    def records_emitted(self) -> int:
        return sum(s.records_emitted for s in self.jobs.values())

    @property
    def bytes_emitted(self) -> int:
        return sum(s.bytes_emitted for s in self.jobs.values())
