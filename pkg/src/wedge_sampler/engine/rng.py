"""Deterministic randomness and hashing for jobs.

Every (job, split) pair and every (job, reduce key) pair owns an
independent numpy stream spawned from the run seed, so results depend on
the seed and the split plan only, never on thread scheduling.
"""

import hashlib

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15

# MurmurHash3 fmix64 constants.
_FMIX_C1 = 0xFF51AFD7ED558CCD
_FMIX_C2 = 0xC4CEB9FE1A85EC53


def fmix64(k: int) -> int:
    """MurmurHash3 64-bit finalizer: a bijective avalanche mix of a u64."""
    k &= MASK64
    k ^= k >> 33
    k = (k * _FMIX_C1) & MASK64
    k ^= k >> 33
    k = (k * _FMIX_C2) & MASK64
    k ^= k >> 33
    return k


def stable_hash64(data: bytes) -> int:
    """Platform- and process-independent 64-bit hash (unlike builtin hash())."""
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "big")


def derive_rng(seed: int, job_id: str, split_index: int) -> np.random.Generator:
    """Independent, reproducible stream for one split of one job."""
    sequence = np.random.SeedSequence(
        entropy=seed,
        spawn_key=(stable_hash64(job_id.encode()), split_index),
    )
    return np.random.Generator(np.random.PCG64(sequence))


def key_rng(seed: int, job_id: str, key: int) -> np.random.Generator:
    """Stream owned by one reduce key, independent of partitioning."""
    return derive_rng(seed, f"{job_id}/reduce", key)
