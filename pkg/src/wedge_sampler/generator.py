"""Synthetic edge lists: noisy Stochastic Kronecker, Erdős–Rényi and planted
communities.

Every generator is a pure function of its parameters and seed. Output is in
canonical form: v < w, no self-edges, no duplicates, sorted.
"""

import math
from collections.abc import Iterator
from pathlib import Path

import numpy as np
import structlog

from .config.schema import SkgConfig
from .engine.rng import derive_rng
from .errors import GeneratorError
from .graph_io import external_sort, write_records
from .records import Edge

logger = structlog.get_logger(__name__)


def noisy_matrices(cfg: SkgConfig, seed: int) -> np.ndarray:
    """Per-level generator matrices, shape (scale, 2, 2).

    Level l draws mu uniform in [-noise, noise], moves mu onto each
    off-diagonal entry and takes 2·mu off the diagonal in proportion to its
    entries, so every level still sums to 1.
    """
    (a, b), (c, d) = cfg.matrix
    mu = derive_rng(seed, "skg-noise", 0).uniform(-cfg.noise, cfg.noise, cfg.scale)
    diag = a + d
    levels = np.empty((cfg.scale, 2, 2))
    levels[:, 0, 0] = a - 2 * mu * a / diag if diag else a
    levels[:, 0, 1] = b + mu
    levels[:, 1, 0] = c + mu
    levels[:, 1, 1] = d - 2 * mu * d / diag if diag else d
    return levels


def _skg_block(
    levels: np.ndarray, size: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    src = np.zeros(size, dtype=np.uint64)
    dst = np.zeros(size, dtype=np.uint64)
    for level, matrix in enumerate(levels):
        cumulative = np.cumsum(matrix.ravel())
        quadrant = np.searchsorted(cumulative, rng.random(size), side="right")
        np.minimum(quadrant, 3, out=quadrant)
        bit = np.uint64(1) << np.uint64(level)
        src |= (quadrant >= 2).astype(np.uint64) * bit
        dst |= (quadrant % 2).astype(np.uint64) * bit
    return src, dst


def _canonical_unique(
    pairs: Iterator[tuple[int, int]], tmp_dir: Path | None
) -> Iterator[Edge]:
    previous = None
    for lo, hi in external_sort(pairs, width=2, tmp_dir=tmp_dir):
        if (lo, hi) != previous:
            yield Edge(lo, hi)
            previous = (lo, hi)


def generate_skg(
    cfg: SkgConfig, seed: int, *, tmp_dir: Path | None = None
) -> Iterator[Edge]:
    """Edges of a noisy SKG graph on 2**scale vertices.

    edge_factor·2**scale candidates are drawn in blocks, each block from its
    own stream; self-edges and duplicates are dropped.
    """
    levels = noisy_matrices(cfg, seed)
    total = cfg.edge_factor << cfg.scale
    permutation = None
    if cfg.permute_vertices:
        permutation = derive_rng(seed, "skg-permute", 0).permutation(1 << cfg.scale)

    def candidates() -> Iterator[tuple[int, int]]:
        for block, start in enumerate(range(0, total, cfg.block_edges)):
            size = min(cfg.block_edges, total - start)
            src, dst = _skg_block(levels, size, derive_rng(seed, "skg", block))
            if permutation is not None:
                src = permutation[src.astype(np.int64)]
                dst = permutation[dst.astype(np.int64)]
            lo = np.minimum(src, dst)
            hi = np.maximum(src, dst)
            keep = lo != hi
            yield from zip(lo[keep].tolist(), hi[keep].tolist())

    logger.debug("Generating SKG graph", scale=cfg.scale, candidates=total)
    return _canonical_unique(candidates(), tmp_dir)


def _decode_pair(x: int) -> Edge:
    """Pair number x of the enumeration (0,1), (0,2), (1,2), (0,3), ..."""
    j = (1 + math.isqrt(1 + 8 * x)) // 2
    return Edge(x - j * (j - 1) // 2, j)


def generate_er(n: int, m: int, seed: int) -> list[Edge]:
    """m distinct edges chosen uniformly among the C(n, 2) pairs of n vertices."""
    if n < 0 or m < 0:
        raise GeneratorError("n and m must be non-negative")
    pairs = n * (n - 1) // 2
    if m > pairs:
        raise GeneratorError(f"cannot place {m} edges on {n} vertices (max {pairs})")
    if m == 0:
        return []
    chosen = derive_rng(seed, "er", 0).choice(pairs, size=m, replace=False)
    return sorted(_decode_pair(x) for x in chosen.tolist())


def generate_community(
    communities: int,
    min_size: int,
    max_size: int,
    p_in: float,
    inter_edges: int,
    seed: int,
) -> list[Edge]:
    """Dense random communities of varying size joined by sparse random edges.

    Degrees track community sizes, so triangles join vertices of similar
    degree and clustering is high.
    """
    if communities < 1 or not 2 <= min_size <= max_size:
        raise GeneratorError("need at least one community and 2 <= min_size <= max_size")
    if not 0 < p_in <= 1:
        raise GeneratorError("p_in must lie in (0, 1]")
    rng = derive_rng(seed, "community", 0)
    sizes = rng.integers(min_size, max_size + 1, size=communities)
    offsets = np.concatenate(([0], np.cumsum(sizes)))
    n = int(offsets[-1])

    edges: set[tuple[int, int]] = set()
    for start, size in zip(offsets[:-1].tolist(), sizes.tolist()):
        i, j = np.triu_indices(size, k=1)
        keep = rng.random(len(i)) < p_in
        edges.update(zip((i[keep] + start).tolist(), (j[keep] + start).tolist()))

    membership = np.repeat(np.arange(communities), sizes)
    placed = 0
    attempts = 0
    while placed < inter_edges and communities > 1:
        attempts += 1
        if attempts > 100 * inter_edges:
            raise GeneratorError("could not place the requested inter-community edges")
        v, w = sorted(rng.integers(0, n, size=2).tolist())
        if membership[v] == membership[w] or (v, w) in edges:
            continue
        edges.add((v, w))
        placed += 1
    return sorted(Edge(v, w) for v, w in edges)


def write_edge_list(path: Path, edges: Iterator[Edge] | list[Edge]) -> int:
    written = write_records(path, edges)
    logger.info("Edge list written", path=str(path), edges=written)
    return written
