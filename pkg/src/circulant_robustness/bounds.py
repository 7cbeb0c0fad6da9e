"""Closed-form robustness guarantees for k-circulant digraphs."""

from __future__ import annotations

import math

__all__ = ["k_circulant_r_bound", "k_circulant_rs_bound", "robustness_implies_rs"]


def k_circulant_r_bound(n: int, k: int) -> int:
    """Guaranteed r-robustness of ``C_n(1..k)``.

    ``ceil(k/2)`` in general; the complete case ``k = n-1`` is ``ceil(n/2)``.
    This is a lower bound: the exact value can be larger (``C_15(1..6)`` is
    4-robust).
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got n={n}")
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} outside [1, {n - 1}] for n={n}")
    if k == n - 1:
        return math.ceil(n / 2)
    return math.ceil(k / 2)


def k_circulant_rs_bound(k: int) -> int:
    """``t`` such that every ``C_n(1..k)`` is at least (t, t)-robust."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got k={k}")
    return (k + 2) // 4 if k % 2 == 0 else (k + 3) // 4


def robustness_implies_rs(r: int, s: int, n: int, observed_robustness: int) -> bool:
    """Whether (r+s-1)-robustness certifies (r,s)-robustness here.

    False means the sufficient condition does not apply, not that the graph
    fails to be (r,s)-robust.
    """
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    level = r + s - 1
    return 1 <= level <= math.ceil(n / 2) and observed_robustness >= level
