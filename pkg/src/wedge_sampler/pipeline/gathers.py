"""Client-side objects gathered between jobs and shipped to later mappers.

Each is a small in-memory view of a phase file: theta (wedges per bin),
gamma (wedge centers) and xi (closure hashes). Gamma and xi are optional; when
they would exceed the configured gather limit they are skipped and the
affected job forwards every edge instead.
"""

from collections.abc import Iterable

import structlog

from ..binning import bin_id
from ..config.schema import BinConfig
from ..records import SampleWedge, WedgeCenter, WedgesPerBin

logger = structlog.get_logger(__name__)

NOT_A_CENTER = 1
SKIPPED = 0


def phase1c_gather(wedges_per_bin: Iterable[WedgesPerBin]) -> dict[int, int]:
    """theta: bin id -> wedge count of the bin."""
    return {record.b: record.p for record in wedges_per_bin}


class CenterIndex:
    """gamma: 0 when the gather was skipped, else the bin id of a wedge center
    and 1 for every other vertex."""

    def __init__(self, bins: dict[int, int] | None):
        self._bins = bins

    @classmethod
    def skipped(cls) -> "CenterIndex":
        return cls(None)

    @property
    def is_skipped(self) -> bool:
        return self._bins is None

    def __call__(self, v: int) -> int:
        if self._bins is None:
            return SKIPPED
        return self._bins.get(v, NOT_A_CENTER)

    def __len__(self) -> int:
        return 0 if self._bins is None else len(self._bins)


def phase2b_gather_centers(
    centers: Iterable[WedgeCenter], cfg: BinConfig, limit: int
) -> CenterIndex:
    bins: dict[int, int] = {}
    for center in centers:
        if len(bins) >= limit:
            logger.warning(
                "Wedge centers exceed gather limit, skipping phase 2b",
                limit=limit,
            )
            return CenterIndex.skipped()
        bins[center.v] = bin_id(center.d, cfg)
    return CenterIndex(bins)


def phase3a_gather_hashes(wedges: Iterable[SampleWedge], limit: int) -> frozenset[int]:
    """xi: distinct closure hashes; empty when the gather is skipped."""
    hashes: set[int] = set()
    for wedge in wedges:
        hashes.add(wedge.h)
        if len(hashes) > limit:
            logger.warning(
                "Closure hashes exceed gather limit, skipping phase 3a",
                limit=limit,
            )
            return frozenset()
    return frozenset(hashes)
