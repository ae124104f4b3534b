"""Edge lists, phase files and input splits.

All files are text, one record per line, fields separated by a tab (edge
lists also accept any whitespace). Blank lines and lines starting with `#`
are ignored. Splits are byte ranges of a file, so a job can stream a file
far larger than memory.
"""

import heapq
import itertools
import struct
import tempfile
from collections.abc import Iterable, Iterator, Sequence
from pathlib import Path
from typing import Any

import structlog

from .errors import EdgeValidationError, GraphFormatError, RecordIOError
from .records import Edge, format_record, record_parser

logger = structlog.get_logger(__name__)

DEFAULT_SORT_CHUNK = 1_000_000


def _is_data_line(raw: bytes) -> bool:
    stripped = raw.strip()
    return bool(stripped) and not stripped.startswith(b"#")


class Split:
    """An ordered run of records from one input, identified by its index.

    Either file-backed (a byte range of `path`) or an in-memory sequence.
    """

    def __init__(
        self,
        index: int,
        *,
        path: Path | None = None,
        start: int = 0,
        end: int = 0,
        count: int = 0,
        record_type: type = Edge,
        records: Sequence[Any] | None = None,
    ):
        self.index = index
        self.path = path
        self.start = start
        self.end = end
        self.record_type = record_type
        self._records = records
        self._count = len(records) if records is not None else count

    @classmethod
    def in_memory(cls, index: int, records: Sequence[Any]) -> "Split":
        return cls(index, records=list(records))

    def __len__(self) -> int:
        return self._count

    def __iter__(self) -> Iterator[Any]:
        if self._records is not None:
            yield from self._records
            return
        assert self.path is not None
        parse = record_parser(self.record_type)
        with open(self.path, "rb") as f:
            f.seek(self.start)
            remaining = self.end - self.start
            while remaining > 0:
                raw = f.readline()
                if not raw:
                    break
                remaining -= len(raw)
                if _is_data_line(raw):
                    yield parse(raw.decode().split())

    def __repr__(self) -> str:
        source = str(self.path) if self.path else "memory"
        return f"Split(index={self.index}, records={self._count}, source={source})"


def balanced_sizes(total: int, split_count: int) -> list[int]:
    """Split sizes that differ by at most one record."""
    if split_count < 1:
        raise ValueError("split_count must be positive")
    base, extra = divmod(total, split_count)
    return [base + (1 if i < extra else 0) for i in range(split_count)]


def split_records(records: Sequence[Any], split_count: int) -> list[Split]:
    """Partition an in-memory record sequence into balanced splits."""
    splits: list[Split] = []
    offset = 0
    for index, size in enumerate(balanced_sizes(len(records), split_count)):
        splits.append(Split.in_memory(index, records[offset : offset + size]))
        offset += size
    return splits


def _scan(path: Path, record_type: type, validate: bool) -> int:
    """Parse every record once, returning the record count."""
    parse = record_parser(record_type)
    count = 0
    try:
        with open(path, "rb") as f:
            for line_number, raw in enumerate(f, start=1):
                if not _is_data_line(raw):
                    continue
                try:
                    record = parse(raw.decode().split())
                except (ValueError, UnicodeDecodeError) as e:
                    raise GraphFormatError(path, line_number, str(e)) from e
                if validate and record[0] == record[1]:
                    raise EdgeValidationError(
                        path, line_number, f"self-edge {record[0]}"
                    )
                count += 1
    except OSError as e:
        raise RecordIOError(path, str(e)) from e
    return count


def _check_duplicates(path: Path, tmp_dir: Path | None) -> None:
    def canonical() -> Iterator[tuple[int, int, int]]:
        with open(path, "rb") as f:
            for line_number, raw in enumerate(f, start=1):
                if _is_data_line(raw):
                    v, w = (int(x) for x in raw.split()[:2])
                    yield (min(v, w), max(v, w), line_number)

    previous: tuple[int, int, int] | None = None
    for current in external_sort(canonical(), width=3, tmp_dir=tmp_dir):
        if previous is not None and previous[:2] == current[:2]:
            raise EdgeValidationError(
                path,
                current[2],
                f"duplicate edge {{{current[0]}, {current[1]}}} "
                f"(first seen on line {previous[2]})",
            )
        previous = current


def read_splits(
    path: Path | str,
    split_count: int,
    record_type: type = Edge,
    *,
    validate: bool = False,
    tmp_dir: Path | None = None,
) -> list[Split]:
    """Scan `path` and cut it into `split_count` balanced, file-backed splits."""
    path = Path(path)
    total = _scan(path, record_type, validate)
    if validate:
        _check_duplicates(path, tmp_dir)

    sizes = balanced_sizes(total, split_count)
    boundaries = list(itertools.accumulate(sizes))
    splits: list[Split] = []
    start = 0
    seen = 0
    offset = 0
    with open(path, "rb") as f:
        for raw in f:
            offset += len(raw)
            if not _is_data_line(raw):
                continue
            seen += 1
            # Empty splits share their neighbour's boundary.
            while len(splits) < split_count and boundaries[len(splits)] == seen:
                index = len(splits)
                splits.append(
                    Split(
                        index,
                        path=path,
                        start=start,
                        end=offset,
                        count=sizes[index],
                        record_type=record_type,
                    )
                )
                start = offset
    while len(splits) < split_count:
        index = len(splits)
        splits.append(
            Split(index, path=path, start=start, end=start, record_type=record_type)
        )

    logger.debug(
        "Input split", path=str(path), records=total, splits=split_count
    )
    return splits


def read_edges(
    path: Path | str,
    split_count: int,
    *,
    validate: bool = False,
    tmp_dir: Path | None = None,
) -> list[Split]:
    """Split an undirected edge list (each edge listed once)."""
    return read_splits(path, split_count, Edge, validate=validate, tmp_dir=tmp_dir)


def iter_records(path: Path | str, record_type: type) -> Iterator[Any]:
    path = Path(path)
    parse = record_parser(record_type)
    try:
        with open(path, "rb") as f:
            for line_number, raw in enumerate(f, start=1):
                if not _is_data_line(raw):
                    continue
                try:
                    yield parse(raw.decode().split())
                except ValueError as e:
                    raise GraphFormatError(path, line_number, str(e)) from e
    except OSError as e:
        raise RecordIOError(path, str(e)) from e


def read_records(path: Path | str, record_type: type) -> list[Any]:
    return list(iter_records(path, record_type))


def write_records(path: Path | str, records: Iterable[tuple[Any, ...]]) -> int:
    """Write records as tab-separated lines; returns the number written."""
    path = Path(path)
    written = 0
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            for record in records:
                f.write(format_record(record))
                f.write("\n")
                written += 1
    except OSError as e:
        raise RecordIOError(path, str(e)) from e
    return written


def external_sort(
    items: Iterable[tuple[int, ...]],
    *,
    width: int,
    chunk_records: int = DEFAULT_SORT_CHUNK,
    tmp_dir: Path | None = None,
) -> Iterator[tuple[int, ...]]:
    """Sort tuples of unsigned 64-bit ints using bounded memory.

    Sorted chunks of `chunk_records` tuples are spilled to temporary files
    and merged lazily.
    """
    record = struct.Struct(f">{width}Q")
    iterator = iter(items)
    chunk_files = []
    try:
        while True:
            chunk = sorted(itertools.islice(iterator, chunk_records))
            if not chunk:
                break
            if not chunk_files and len(chunk) < chunk_records:
                # Everything fit in one chunk.
                yield from chunk
                return
            f = tempfile.TemporaryFile(dir=tmp_dir)
            f.write(b"".join(record.pack(*values) for values in chunk))
            f.seek(0)
            chunk_files.append(f)

        def load(f: Any) -> Iterator[tuple[int, ...]]:
            while block := f.read(record.size * 4096):
                yield from record.iter_unpack(block)

        yield from heapq.merge(*(load(f) for f in chunk_files))
    finally:
        for f in chunk_files:
            f.close()
