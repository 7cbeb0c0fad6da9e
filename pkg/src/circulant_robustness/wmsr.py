"""W-MSR filtering, weight schemes and the plain linear consensus step."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .graph import Digraph

__all__ = [
    "InfeasibleWeightsError",
    "WeightScheme",
    "linear_consensus_step",
    "wmsr_filter",
    "wmsr_update",
]

Received = Sequence[tuple[int, float]]


class InfeasibleWeightsError(ValueError):
    """``alpha`` is too large to give every retained value weight >= alpha."""

    def __init__(self, alpha: float, retained: int):
        self.alpha = alpha
        self.retained = retained
        self.max_retained = math.floor(1 / alpha) - 1
        super().__init__(
            f"alpha={alpha:g} cannot weight {retained} retained values plus self; "
            f"at most {self.max_retained} retained values are feasible"
        )


@dataclass(frozen=True)
class WeightScheme:
    """Weights over the retained in-neighbors plus self.

    Only the ``uniform`` rule is provided: every one of the ``m + 1`` values
    gets weight ``1 / (m + 1)``, which satisfies the lower bound ``alpha``
    whenever ``(m + 1) * alpha <= 1``.
    """

    alpha: float
    rule: str = "uniform"

    def __post_init__(self) -> None:
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.rule != "uniform":
            raise ValueError(f"unknown weight rule {self.rule!r}")

    @classmethod
    def for_in_degree(cls, k: int) -> WeightScheme:
        """Default scheme for graphs with maximum in-degree ``k``: ``alpha = 1/(2k)``."""
        return cls(1 / (2 * k) if k >= 1 else 0.5)

    def weight(self, retained: int) -> float:
        """Common weight of self and each of ``retained`` neighbor values."""
        if (retained + 1) * self.alpha > 1 + 1e-12:
            raise InfeasibleWeightsError(self.alpha, retained)
        return 1.0 / (retained + 1)

    def weights(self, own_id: int, retained_ids: Sequence[int]) -> dict[int, float]:
        w = self.weight(len(retained_ids))
        out = {own_id: w}
        out.update((j, w) for j in retained_ids)
        return out


def wmsr_filter(own: float, received: Received, f: int) -> list[tuple[int, float]]:
    """Drop up to ``f`` values above and ``f`` values below ``own``.

    If at most ``f`` received values are strictly greater than ``own`` they are
    all removed, otherwise the ``f`` largest are; likewise below. Values equal
    to ``own`` are never removed. Ties among extremes are broken by
    ``(value, neighbor id)`` order. Returns the survivors sorted the same way.
    """
    if f < 0:
        raise ValueError(f"F must be non-negative, got {f}")
    for j, v in received:
        if not math.isfinite(v):
            raise ValueError(f"non-finite value {v!r} received from neighbor {j}")
    ordered = sorted(received, key=lambda p: (p[1], p[0]))
    below = [p for p in ordered if p[1] < own]
    above = [p for p in ordered if p[1] > own]
    dropped = set()
    dropped.update(p[0] for p in (below if len(below) <= f else below[:f]))
    dropped.update(p[0] for p in (above if len(above) <= f else above[len(above) - f :]))
    return [p for p in ordered if p[0] not in dropped]


def wmsr_update(own: float, retained: Received, scheme: WeightScheme) -> float:
    values = [own] + [v for _, v in retained]
    w = scheme.weight(len(retained))
    x = math.fsum(w * v for v in values)
    # convex combination: clamp away rounding drift
    return min(max(x, min(values)), max(values))


def linear_consensus_step(g: Digraph, states: Sequence[float], scheme: WeightScheme) -> list[float]:
    """One unfiltered update of every agent over its full in-neighbor set."""
    if len(states) != g.n:
        raise ValueError(f"expected {g.n} states, got {len(states)}")
    return [
        wmsr_update(states[i], [(j, states[j]) for j in g.in_neighbors(i)], scheme)
        for i in range(g.n)
    ]
