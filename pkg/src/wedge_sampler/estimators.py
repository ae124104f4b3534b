"""Sample-size bounds, per-bin estimators and the global aggregate."""

import math
from collections.abc import Iterable, Mapping

import structlog
from pydantic import BaseModel, Field

from .errors import EmptyBinError
from .records import BinSummary

logger = structlog.get_logger(__name__)


class SampleBudget(BaseModel):
    eps: float = Field(description="Additive error")
    delta: float = Field(description="Failure probability")
    k: int = Field(description="Samples per bin")

    @classmethod
    def from_error(cls, eps: float, delta: float) -> "SampleBudget":
        return cls(eps=eps, delta=delta, k=required_samples(eps, delta))


class GlobalEstimate(BaseModel):
    c: float = Field(description="Estimated global clustering coefficient")
    t: float = Field(description="Estimated triangle count")
    p: int = Field(description="Total wedges, unsampled bins included")
    bins: int = Field(description="Bins contributing to the aggregate")
    unsampled_wedges: int = Field(
        default=0, description="Wedges in bins that drew no samples, included in p"
    )
    delta: float | None = None
    confidence: float | None = Field(
        default=None, description="Union-bound confidence 1 - bins * delta"
    )


def _check_unit_interval(name: str, value: float) -> None:
    if not 0 < value < 1:
        raise ValueError(f"{name} must lie in (0, 1), got {value}")


def required_samples(eps: float, delta: float) -> int:
    """Samples per bin so the estimate is within eps with probability 1 - delta."""
    _check_unit_interval("eps", eps)
    _check_unit_interval("delta", delta)
    return math.ceil(0.5 * eps**-2 * math.log(2 / delta))


def achievable_error(k: int, delta: float) -> float:
    """Error bound guaranteed by k samples at confidence 1 - delta."""
    if k < 1:
        raise ValueError("k must be positive")
    _check_unit_interval("delta", delta)
    return math.sqrt(math.log(2 / delta) / (2 * k))


def cc_estimate(closed: int, total: int) -> float:
    if total < 1:
        raise EmptyBinError("bin has no sampled wedges")
    if not 0 <= closed <= total:
        raise ValueError(f"closed count {closed} outside [0, {total}]")
    return closed / total


def triangle_estimate(q1: int, q2: int, q3: int, total: int, p: int) -> float:
    """Triangles touching the bin, weighting a triangle by its vertices in the bin."""
    if total < 1:
        raise EmptyBinError("bin has no sampled wedges")
    if min(q1, q2, q3) < 0 or q1 + q2 + q3 > total:
        raise ValueError("closed-wedge tallies inconsistent with total")
    # Integer numerator keeps exhaustive runs exact.
    return p * (6 * q1 + 3 * q2 + 2 * q3) / (6 * total)


def summarize_bin(b: int, q0: int, q1: int, q2: int, q3: int, p: int) -> BinSummary:
    total = q0 + q1 + q2 + q3
    return BinSummary(
        b=b,
        q0=q0,
        q1=q1,
        q2=q2,
        q3=q3,
        c=cc_estimate(q1 + q2 + q3, total),
        p=p,
        t=triangle_estimate(q1, q2, q3, total, p),
    )


def global_aggregate(
    summaries: Iterable[BinSummary],
    delta: float | None = None,
    wedges_per_bin: Mapping[int, int] | None = None,
) -> GlobalEstimate:
    """Wedge-weighted mean of the per-bin estimates.

    `wedges_per_bin` maps each bin to its exact wedge count. Bins holding
    wedges but missing from `summaries` drew no samples: their wedges are
    added to `p` while `c` stays the mean over the sampled bins.
    """
    populated = [s for s in summaries if s.p > 0]
    if not populated:
        raise EmptyBinError("no wedges: every bin is empty")
    sampled_p = sum(s.p for s in populated)
    c = sum(s.p * s.c for s in populated) / sampled_p

    unsampled = 0
    if wedges_per_bin is not None:
        sampled_bins = {s.b for s in populated}
        missing = sorted(
            b for b, n in wedges_per_bin.items() if n > 0 and b not in sampled_bins
        )
        if missing:
            unsampled = sum(wedges_per_bin[b] for b in missing)
            logger.warning(
                "Bins with wedges drew no samples", bins=missing, wedges=unsampled
            )
    p = sampled_p + unsampled
    c = min(1.0, max(0.0, c))
    confidence = None
    if delta is not None:
        confidence = max(0.0, 1.0 - len(populated) * delta)
    return GlobalEstimate(
        c=c,
        t=c * p / 3,
        p=p,
        bins=len(populated),
        unsampled_wedges=unsampled,
        delta=delta,
        confidence=confidence,
    )
