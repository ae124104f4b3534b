"""Record schemas of the edge list, the degree file and every pipeline phase file.

Each schema is a NamedTuple whose annotations drive the tab-separated text
codec: one record per line, fields in declaration order.
"""

from collections.abc import Callable
from enum import StrEnum
from typing import Any, NamedTuple, get_type_hints


class Sigma(StrEnum):
    OPEN = "open"
    CLOSED = "closed"


class Edge(NamedTuple):
    v: int
    w: int


class DegreeRecord(NamedTuple):
    v: int
    d: int


class WedgesPerBin(NamedTuple):
    b: int
    n: int
    p: int


class WedgeCenter(NamedTuple):
    v: int
    d: int
    q: int
    p: int


class SampleWedge(NamedTuple):
    h: int
    v0: int
    v1: int
    v2: int
    p: int
    d0: int


class WedgeResult(NamedTuple):
    """Results file ver. 0: closure flag plus the sample wedge."""

    sigma: Sigma
    v0: int
    v1: int
    v2: int
    p: int
    d0: int


class WedgeResultV1(NamedTuple):
    sigma: Sigma
    v0: int
    v1: int
    v2: int
    p: int
    d0: int
    d1: int


class WedgeResultV2(NamedTuple):
    sigma: Sigma
    v0: int
    v1: int
    v2: int
    p: int
    d0: int
    d1: int
    d2: int


class BinSummary(NamedTuple):
    b: int
    q0: int
    q1: int
    q2: int
    q3: int
    c: float
    p: int
    t: float


def _format_field(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_record(record: tuple[Any, ...]) -> str:
    """Serialize a record to one tab-separated line (no newline)."""
    return "\t".join(_format_field(value) for value in record)


U64_MAX = 2**64 - 1


def parse_u64(text: str) -> int:
    """Vertex ids, degrees and counts are all unsigned 64-bit."""
    value = int(text)
    if not 0 <= value <= U64_MAX:
        raise ValueError(f"{text} is outside the unsigned 64-bit range")
    return value


_PARSERS: dict[type, Callable[[list[str]], tuple[Any, ...]]] = {}


def record_parser(record_type: type) -> Callable[[list[str]], tuple[Any, ...]]:
    """Build (and cache) a parser turning split text fields into `record_type`."""
    parser = _PARSERS.get(record_type)
    if parser is not None:
        return parser

    hints = get_type_hints(record_type)
    converters = [
        parse_u64 if hints[name] is int else hints[name]
        for name in record_type._fields  # type: ignore[attr-defined]
    ]
    width = len(converters)

    def parse(fields: list[str]) -> tuple[Any, ...]:
        if len(fields) != width:
            raise ValueError(f"expected {width} fields, found {len(fields)}")
        return record_type(*(conv(f) for conv, f in zip(converters, fields)))

    _PARSERS[record_type] = parse
    return parse


def parse_record(record_type: type, line: str) -> Any:
    return record_parser(record_type)(line.rstrip("\r\n").split("\t"))
