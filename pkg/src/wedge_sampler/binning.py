"""Degree bins.

Bins 1..tau hold a single degree each; bin k > tau starts at degree
ceil((omega**(k - tau) - 1) / (omega - 1)) + tau and ends one below the
start of bin k + 1.
"""

import math
from fractions import Fraction
from functools import lru_cache

from .config.schema import BinConfig


@lru_cache(maxsize=65536)
def _lo_deg(b: int, tau: int, omega: float) -> int:
    if b <= tau:
        return b
    e = b - tau
    if omega.is_integer():
        w = int(omega)
        # Geometric sum 1 + w + ... + w**(e-1) is already integral.
        return (w**e - 1) // (w - 1) + tau
    w_exact = Fraction(omega)
    return math.ceil((w_exact**e - 1) / (w_exact - 1)) + tau


def bin_lo_deg(b: int, cfg: BinConfig) -> int:
    """Lowest degree that falls in bin `b`."""
    if b < 1:
        raise ValueError(f"bin id must be >= 1, got {b}")
    return _lo_deg(b, cfg.tau, cfg.omega)


@lru_cache(maxsize=262144)
def _bin_id(d: int, tau: int, omega: float) -> int:
    if d <= tau:
        return d
    b = math.floor(math.log1p((omega - 1) * (d - tau)) / math.log(omega)) + tau
    b = max(b, tau + 1)
    # Float logs misplace degrees sitting on a bin edge; settle with exact bounds.
    while b > tau + 1 and _lo_deg(b, tau, omega) > d:
        b -= 1
    while _lo_deg(b + 1, tau, omega) <= d:
        b += 1
    return b


def bin_id(d: int, cfg: BinConfig) -> int:
    """Bin containing degree `d`. Degree-zero vertices have no bin."""
    if d < 1:
        raise ValueError(f"degree must be >= 1, got {d}")
    return _bin_id(d, cfg.tau, cfg.omega)


def bin_hi_deg(b: int, cfg: BinConfig) -> int:
    """Highest degree in bin `b`."""
    return bin_lo_deg(b + 1, cfg) - 1
