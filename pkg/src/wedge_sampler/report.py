"""Summary files and per-bin reports.

The summary file is shared by the sampling pipeline and the exact oracle so
their outputs can be diffed line by line.
"""

import csv
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import NamedTuple

import structlog

from .binning import bin_hi_deg, bin_lo_deg
from .config.schema import BinConfig
from .errors import RecordIOError
from .graph_io import read_records
from .records import BinSummary, WedgesPerBin, format_record

logger = structlog.get_logger(__name__)

SUMMARY_COLUMNS = BinSummary._fields


def summary_header(cfg: BinConfig, k: int | None, seed: int | None) -> str:
    fields = [f"tau={cfg.tau}", f"omega={cfg.omega!r}"]
    fields.append(f"k={'exact' if k is None else k}")
    fields.append(f"seed={'none' if seed is None else seed}")
    return "# " + "\t".join(fields)


def write_summary(
    path: Path,
    summaries: Iterable[BinSummary],
    cfg: BinConfig,
    *,
    k: int | None = None,
    seed: int | None = None,
) -> None:
    """Write summaries ordered by bin, under a provenance header."""
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            f.write(summary_header(cfg, k, seed) + "\n")
            f.write("# " + "\t".join(SUMMARY_COLUMNS) + "\n")
            for summary in sorted(summaries):
                f.write(format_record(summary) + "\n")
    except OSError as e:
        raise RecordIOError(path, str(e)) from e


def read_summary(path: Path) -> list[BinSummary]:
    return read_records(path, BinSummary)


class BinReportRow(NamedTuple):
    b: int
    lo_deg: int
    hi_deg: int
    n: int
    p: int
    sampled: int
    c: float | None
    t: float | None
    triangle_share: float | None


BIN_REPORT_COLUMNS = BinReportRow._fields


def bin_report(
    wedges_per_bin: Sequence[WedgesPerBin],
    summaries: Sequence[BinSummary],
    cfg: BinConfig,
) -> list[BinReportRow]:
    """One row per populated bin: degree range, vertex and wedge counts, and
    the estimates where the bin was sampled.

    `triangle_share` is the estimated fraction of all triangles that touch the
    bin; shares can add up to more than one since a triangle touches up to
    three bins.
    """
    by_bin = {s.b: s for s in summaries}
    total_triangles = sum(s.p * s.c for s in summaries) / 3
    rows: list[BinReportRow] = []
    for record in sorted(wedges_per_bin):
        summary = by_bin.get(record.b)
        c = t = share = None
        sampled = 0
        if summary is not None:
            c, t = summary.c, summary.t
            sampled = summary.q0 + summary.q1 + summary.q2 + summary.q3
            if total_triangles > 0:
                share = summary.t / total_triangles
        rows.append(
            BinReportRow(
                b=record.b,
                lo_deg=bin_lo_deg(record.b, cfg),
                hi_deg=bin_hi_deg(record.b, cfg),
                n=record.n,
                p=record.p,
                sampled=sampled,
                c=c,
                t=t,
                triangle_share=share,
            )
        )
    return rows


def write_bin_report(path: Path, rows: Iterable[BinReportRow]) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(BIN_REPORT_COLUMNS)
            for row in rows:
                writer.writerow("" if value is None else value for value in row)
    except OSError as e:
        raise RecordIOError(path, str(e)) from e
    logger.debug("Bin report written", path=str(path))
