"""Per-vertex sample budgets and the simulated wedge-sampling subroutine."""

import numpy as np


def wedge_count(d: int) -> int:
    return d * (d - 1) // 2


def round_budget(d: int, k: int, theta_b: int, rng: np.random.Generator) -> int:
    """Probabilistically round q* = C(d,2)·k/θ(b) so that E[q] = q*.

    Works on exact integers: q* = floor + rem/theta_b, and the budget rounds
    up with probability rem/theta_b.
    """
    if theta_b <= 0:
        raise ValueError("theta_b must be positive")
    floor, rem = divmod(wedge_count(d) * k, theta_b)
    if rem and rng.random() * theta_b < rem:
        return floor + 1
    return floor


def sampling_subroutine(
    d: int, q: int, rng: np.random.Generator
) -> tuple[int, np.ndarray]:
    """Draw q wedges uniformly with replacement among the C(d,2) wedges at a center.

    Returns d', the number of distinct neighbor positions touched, and a
    (q, 2) array of endpoint positions remapped onto 1..d'. The center reads
    its first d' (randomly ordered) edges and pairs them by position.
    """
    if d < 2:
        raise ValueError("a wedge center needs degree at least 2")
    if q < 1:
        raise ValueError("q must be positive")
    i = rng.integers(0, d, size=q)
    j = rng.integers(0, d - 1, size=q)
    j += j >= i
    used, inverse = np.unique(np.concatenate((i, j)), return_inverse=True)
    # The edge stream is already in random order, so any fixed relabelling of
    # the used positions onto 1..d' is a uniform choice of edges.
    pairs = inverse.reshape(2, q).T + 1
    return len(used), pairs


def exhaustive_pairs(d: int) -> tuple[int, np.ndarray]:
    """Every wedge at a degree-d center exactly once."""
    i, j = np.triu_indices(d, k=1)
    return d, np.stack((i + 1, j + 1), axis=1)
