"""Map-side buffering, spilling and reduce-side merging.

A shuffled entry is the tuple (key, secondary, split, seq, value). Sorting
entries orders them by key, then secondary key, with (split, seq) breaking
ties, which makes every merge reproducible byte for byte.
"""

import heapq
import itertools
import struct
import uuid
from collections.abc import Callable, Iterable, Iterator
from pathlib import Path

from .rng import stable_hash64

Entry = tuple[bytes, bytes, int, int, bytes]

# key length, secondary length, value length, split index, sequence number
_HEADER = struct.Struct(">HHIIQ")


def partition_for(key: bytes, reducer_count: int) -> int:
    return stable_hash64(key) % reducer_count


def _write_entries(f, entries: Iterable[Entry]) -> None:
    pack = _HEADER.pack
    for key, secondary, split, seq, value in entries:
        f.write(pack(len(key), len(secondary), len(value), split, seq))
        f.write(key)
        f.write(secondary)
        f.write(value)


class FileRun:
    """A sorted segment [start, end) of a spill file."""

    def __init__(self, path: Path, start: int, end: int):
        self.path = path
        self.start = start
        self.end = end

    def __iter__(self) -> Iterator[Entry]:
        header_size = _HEADER.size
        unpack = _HEADER.unpack
        with open(self.path, "rb", buffering=1 << 16) as f:
            f.seek(self.start)
            position = self.start
            while position < self.end:
                klen, slen, vlen, split, seq = unpack(f.read(header_size))
                body = f.read(klen + slen + vlen)
                position += header_size + len(body)
                yield (
                    body[:klen],
                    body[klen : klen + slen],
                    split,
                    seq,
                    body[klen + slen :],
                )


Run = FileRun | list[Entry]


class MapOutputBuffer:
    """Collects one mapper's output, partitions it, and spills sorted runs."""

    def __init__(
        self,
        split_index: int,
        reducer_count: int,
        spill_records: int,
        spill_dir: Path,
        combiner: Callable[[bytes, bytes], bytes] | None = None,
    ):
        self.split_index = split_index
        self.reducer_count = reducer_count
        self.spill_records = spill_records
        self.spill_dir = spill_dir
        self.combiner = combiner

        self.pre_combine_records = 0
        self.records_emitted = 0
        self.bytes_emitted = 0

        self._seq = 0
        self._buffered = 0
        self._buffers: list[list[Entry]] = [[] for _ in range(reducer_count)]
        self._combined: dict[tuple[bytes, bytes], bytes] = {}
        self._runs: list[list[Run]] = [[] for _ in range(reducer_count)]
        self._spilled = False

    def emit(self, key: bytes, value: bytes, secondary: bytes = b"") -> None:
        self.pre_combine_records += 1
        if self.combiner is None:
            self._append(key, secondary, value)
            return
        slot = (key, secondary)
        previous = self._combined.get(slot)
        self._combined[slot] = value if previous is None else self.combiner(
            previous, value
        )
        if len(self._combined) >= self.spill_records:
            self._flush_combiner()

    def _flush_combiner(self) -> None:
        combined, self._combined = self._combined, {}
        for (key, secondary), value in combined.items():
            self._append(key, secondary, value)

    def _append(self, key: bytes, secondary: bytes, value: bytes) -> None:
        partition = partition_for(key, self.reducer_count)
        self._buffers[partition].append(
            (key, secondary, self.split_index, self._seq, value)
        )
        self._seq += 1
        self.records_emitted += 1
        self.bytes_emitted += len(key) + len(secondary) + len(value)
        self._buffered += 1
        if self._buffered >= self.spill_records:
            self._spill()

    def _spill(self) -> None:
        path = self.spill_dir / f"spill-{self.split_index:05d}-{uuid.uuid4().hex}.run"
        with open(path, "wb") as f:
            for partition, buffer in enumerate(self._buffers):
                if not buffer:
                    continue
                buffer.sort()
                start = f.tell()
                _write_entries(f, buffer)
                self._runs[partition].append(FileRun(path, start, f.tell()))
                buffer.clear()
        self._buffered = 0
        self._spilled = True

    @property
    def spilled_runs(self) -> int:
        return sum(
            isinstance(run, FileRun) for runs in self._runs for run in runs
        )

    def close(self) -> list[list[Run]]:
        """Finish the map task; returns the sorted runs of each partition."""
        self._flush_combiner()
        if self._spilled:
            if self._buffered:
                self._spill()
        else:
            for partition, buffer in enumerate(self._buffers):
                if buffer:
                    buffer.sort()
                    self._runs[partition].append(buffer)
            self._buffers = [[] for _ in range(self.reducer_count)]
        return self._runs


def merge_runs(runs: list[Run], fan_in: int, spill_dir: Path) -> Iterator[Entry]:
    """Merge sorted runs, in several passes when there are more than `fan_in`."""
    runs = list(runs)
    while len(runs) > fan_in:
        merged: list[Run] = []
        for group_start in range(0, len(runs), fan_in):
            group = runs[group_start : group_start + fan_in]
            if len(group) == 1:
                merged.append(group[0])
                continue
            path = spill_dir / f"merge-{uuid.uuid4().hex}.run"
            with open(path, "wb") as f:
                _write_entries(f, heapq.merge(*group))
                end = f.tell()
            merged.append(FileRun(path, 0, end))
        runs = merged
    if len(runs) == 1:
        return iter(runs[0])
    return heapq.merge(*runs)


def group_by_key(
    entries: Iterator[Entry],
) -> Iterator[tuple[bytes, Iterator[tuple[bytes, bytes]]]]:
    for key, group in itertools.groupby(entries, key=lambda e: e[0]):
        yield key, ((entry[1], entry[4]) for entry in group)
