"""Closure-edge hashing and per-edge random sort keys.

Both are pure functions of their arguments, so every mapper computes the
same value for the same edge without coordination.
"""

from ..engine.rng import GOLDEN_GAMMA, MASK64, fmix64

SORT_KEY_BITS = 63


def edge_hash(a: int, b: int) -> int:
    """Symmetric 64-bit hash of the undirected edge {a, b}."""
    lo, hi = (a, b) if a <= b else (b, a)
    return fmix64(lo ^ fmix64((hi + GOLDEN_GAMMA) & MASK64))


def edge_sort_key(seed: int, center: int, neighbor: int) -> int:
    """Random position of edge (center, neighbor) in the center's edge stream.

    Uniform on [1, 2**63]; 0 stays reserved for the center record itself.
    """
    x = fmix64((seed * GOLDEN_GAMMA + center) & MASK64)
    x = fmix64(x ^ ((neighbor + GOLDEN_GAMMA) & MASK64))
    return (x >> (64 - SORT_KEY_BITS)) + 1


def keeps_edge(sort_key: int, k: int, d_min: int) -> bool:
    """Downselection coin with probability min(1, 4k/d_min).

    Tied to the sort key: the kept edges are always a prefix of the center's
    stream, so filtering never changes which edges a center reads first.
    """
    if d_min <= 4 * k:
        return True
    return (sort_key - 1) * d_min < (4 * k) << SORT_KEY_BITS
