"""Statistics over uniformly sampled triangles.

In a single-bin run every closed wedge names a triangle chosen uniformly at
random (with replacement), so the degree profile of those triangles
estimates the profile of all triangles.
"""

import csv
from collections import Counter
from collections.abc import Iterable, Sequence
from itertools import groupby
from pathlib import Path
from typing import NamedTuple

import numpy as np
import structlog

from .binning import bin_id
from .config.schema import BinConfig
from .errors import RecordIOError, TriStatsError
from .oracle import Graph, enumerate_triangles
from .records import Sigma, WedgeResultV2

logger = structlog.get_logger(__name__)

# Bins used to group triangles by their smallest degree.
ASSORTATIVITY_BINS = BinConfig(tau=2, omega=2.0)

WHISKER_IQR = 1.5


class TriangleSample(NamedTuple):
    a: int
    b: int
    c: int
    d_min: int
    d_mid: int
    d_max: int

    @property
    def vertices(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)


def _triangle(vertex_degrees: Iterable[tuple[int, int]]) -> TriangleSample:
    pairs = list(vertex_degrees)
    a, b, c = sorted(v for v, _ in pairs)
    d_min, d_mid, d_max = sorted(d for _, d in pairs)
    return TriangleSample(a, b, c, d_min, d_mid, d_max)


def extract_triangles(
    results: Iterable[WedgeResultV2], cfg: BinConfig
) -> list[TriangleSample]:
    """One sample per closed wedge of a single-bin run."""
    if cfg.tau != 1:
        raise TriStatsError(
            f"triangle samples need a single-bin run (tau=1), got tau={cfg.tau}"
        )
    samples = []
    for r in results:
        if bin_id(r.d0, cfg) != 2:
            raise TriStatsError(
                f"wedge center {r.v0} with degree {r.d0} lies outside the single "
                f"bin; raise omega above {cfg.omega!r}"
            )
        if r.sigma is Sigma.CLOSED:
            samples.append(_triangle(((r.v0, r.d0), (r.v1, r.d1), (r.v2, r.d2))))
    return samples


def exact_triangles(graph: Graph) -> list[TriangleSample]:
    """Every triangle of the graph once, for the exhaustive table."""
    return [
        _triangle((v, graph.degree(v)) for v in triangle)
        for triangle in enumerate_triangles(graph)
    ]


def triangle_frequencies(samples: Iterable[TriangleSample]) -> Counter:
    return Counter(s.vertices for s in samples)


class AssortativityRow(NamedTuple):
    min_bin: int
    count: int
    q25: float
    median: float
    q75: float
    lo_whisker: float
    hi_whisker: float


class Outlier(NamedTuple):
    min_bin: int
    d_max: int


class AssortativitySummary(NamedTuple):
    rows: list[AssortativityRow]
    outliers: list[Outlier]

    def medians(self) -> dict[int, float]:
        return {row.min_bin: row.median for row in self.rows}


def assortativity_table(
    samples: Sequence[TriangleSample], cfg: BinConfig = ASSORTATIVITY_BINS
) -> AssortativitySummary:
    """Box-plot statistics of the max degree, grouped by the bin of the min degree.

    Whiskers reach the most extreme values within 1.5 IQR of the quartiles;
    values beyond them are outliers.
    """
    if not samples:
        raise TriStatsError("no triangle samples")
    keyed = sorted((bin_id(s.d_min, cfg), s.d_max) for s in samples)
    rows: list[AssortativityRow] = []
    outliers: list[Outlier] = []
    for min_bin, group in groupby(keyed, key=lambda item: item[0]):
        values = np.array([d_max for _, d_max in group], dtype=float)
        q25, median, q75 = np.percentile(values, [25, 50, 75])
        spread = WHISKER_IQR * (q75 - q25)
        inside = values[(values >= q25 - spread) & (values <= q75 + spread)]
        rows.append(
            AssortativityRow(
                min_bin=min_bin,
                count=len(values),
                q25=float(q25),
                median=float(median),
                q75=float(q75),
                lo_whisker=float(inside.min()),
                hi_whisker=float(inside.max()),
            )
        )
        outside = values[(values < q25 - spread) | (values > q75 + spread)]
        outliers.extend(Outlier(min_bin, int(v)) for v in outside.tolist())
    logger.debug("Assortativity table built", samples=len(samples), rows=len(rows))
    return AssortativitySummary(rows, outliers)


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[tuple]) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise RecordIOError(path, str(e)) from e


def write_assortativity(
    summary: AssortativitySummary, table_path: Path, outliers_path: Path
) -> None:
    _write_csv(table_path, AssortativityRow._fields, summary.rows)
    _write_csv(outliers_path, Outlier._fields, summary.outliers)
