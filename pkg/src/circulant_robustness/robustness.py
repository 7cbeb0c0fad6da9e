"""Exact r-robustness and (r,s)-robustness by exhaustive enumeration.

Three strategies share one chunked, order-preserving driver:

``full-pairs``
    Every assignment of nodes to S1 / S2 / neither (``3**n`` states). This is
    the definition itself and serves as the oracle.
``partitions-only``
    Only pairs with ``S1 | S2 == V`` (``2**(n-1)`` states). Fast, but not
    exact on general digraphs: a graph with two source components is not
    1-robust, yet every partition of it is. Kept for cross-checking.
``peeling``
    Exact and as cheap as partitions. A set is *r-closed* when none of its
    members has ``r`` or more in-neighbors outside it. Unions of r-closed sets
    are r-closed, so for each r-closed ``S1`` the largest r-closed subset of
    the complement is found by repeatedly dropping members with ``>= r``
    outside in-neighbors. The graph is r-robust iff that remainder is empty
    for every r-closed ``S1``.

All searches scan states in a fixed index order and report the first witness,
so results are identical for any worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator, TypeVar

import numpy as np

from .graph import Digraph, NodeSubset

__all__ = [
    "EnumerationBudgetError",
    "RobustnessReport",
    "RsReport",
    "Strategy",
    "SubsetPair",
    "default_workers",
    "is_r_reachable",
    "is_r_robust",
    "is_rs_robust",
    "max_f_local_tolerance",
    "max_r_robustness",
    "outside_in_degree",
    "pair_is_r_witness",
    "reachable_members",
]

THREADS_ENV = "CIRCROBUST_THREADS"

_T = TypeVar("_T")


class Strategy(str, Enum):
    FULL_PAIRS = "full-pairs"
    PARTITIONS = "partitions-only"
    PEELING = "peeling"


# Largest n each strategy accepts; the bitmask representation caps everything at 64.
MAX_N = {Strategy.FULL_PAIRS: 15, Strategy.PARTITIONS: 24, Strategy.PEELING: 22}
MASK_CAP = 64
_CHUNK_ROWS = 1 << 15


class EnumerationBudgetError(ValueError):
    """The requested enumeration is larger than the strategy's budget."""


@dataclass(frozen=True)
class SubsetPair:
    s1: NodeSubset
    s2: NodeSubset

    def __post_init__(self) -> None:
        if self.s1.n != self.s2.n:
            raise ValueError("subsets belong to graphs of different sizes")
        if not self.s1 or not self.s2:
            raise ValueError("both subsets of a pair must be nonempty")
        if self.s1.mask & self.s2.mask:
            raise ValueError("subsets of a pair must be disjoint")

    def rotate(self, shift: int = 1) -> SubsetPair:
        return SubsetPair(self.s1.rotate(shift), self.s2.rotate(shift))

    def as_lists(self, base: int = 0) -> tuple[list[int], list[int]]:
        return [v + base for v in self.s1], [v + base for v in self.s2]


@dataclass(frozen=True)
class RobustnessReport:
    """``max_r`` plus a pair certifying that the graph is not ``(max_r + 1)``-robust."""

    max_r: int
    witness: SubsetPair | None
    method: Strategy

    @property
    def failing_r(self) -> int:
        return self.max_r + 1


@dataclass(frozen=True)
class RsReport:
    r: int
    s: int
    holds: bool
    witness: SubsetPair | None = None
    x1_size: int | None = None
    x2_size: int | None = None


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValueError(f"{THREADS_ENV}={raw!r} is not an integer") from None


# ---------------------------------------------------------------------------
# Single-set predicates (pure Python, used for witnesses and small checks)
# ---------------------------------------------------------------------------


def outside_in_degree(g: Digraph, i: int, s: NodeSubset) -> int:
    """``|K_i \\ S|``."""
    return (g.in_masks[i] & ~s.mask).bit_count()


def reachable_members(g: Digraph, s: NodeSubset, r: int) -> NodeSubset:
    """Members of ``s`` with at least ``r`` in-neighbors outside ``s``."""
    return NodeSubset.of((i for i in s if outside_in_degree(g, i, s) >= r), g.n)


def is_r_reachable(g: Digraph, s: NodeSubset, r: int) -> bool:
    if not s:
        raise ValueError("r-reachability is only defined for nonempty sets")
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    return any(outside_in_degree(g, i, s) >= r for i in s)


def pair_is_r_witness(g: Digraph, pair: SubsetPair, r: int) -> bool:
    """True when neither side of ``pair`` is r-reachable."""
    return not is_r_reachable(g, pair.s1, r) and not is_r_reachable(g, pair.s2, r)


# ---------------------------------------------------------------------------
# Chunked enumeration driver
# ---------------------------------------------------------------------------


def _check_budget(n: int, strategy: Strategy) -> None:
    if n > MASK_CAP:
        raise EnumerationBudgetError(f"n={n} exceeds the {MASK_CAP}-node bitmask cap")
    limit = MAX_N[strategy]
    if n > limit:
        if strategy is Strategy.FULL_PAIRS:
            hint = "use the peeling strategy or a smaller graph"
        else:
            hint = "use a smaller graph"
        raise EnumerationBudgetError(
            f"n={n} exceeds the {strategy.value} budget (n <= {limit}, "
            f"~{_state_count(n, strategy):.3g} states); {hint}"
        )


def _state_count(n: int, strategy: Strategy) -> int:
    if strategy is Strategy.FULL_PAIRS:
        return 3**n
    if strategy is Strategy.PARTITIONS:
        return max(0, 2 ** (n - 1) - 1)
    return max(0, 2**n - 2)


def _ranges(total: int, chunk: int = _CHUNK_ROWS) -> list[tuple[int, int]]:
    return [(lo, min(total, lo + chunk)) for lo in range(0, total, chunk)]


def _scan(
    total: int,
    work: Callable[[int, int], _T],
    workers: int | None,
    stop: Callable[[_T], bool] = lambda _: False,
) -> Iterator[_T]:
    """Yield ``work(lo, hi)`` over contiguous ranges of ``[0, total)`` in order.

    Iteration ends early once ``stop`` accepts a partial result; with several
    workers the ranges already submitted are discarded.
    """
    ranges = _ranges(total)
    workers = default_workers() if workers is None else max(1, workers)
    if workers == 1 or len(ranges) == 1:
        for lo, hi in ranges:
            part = work(lo, hi)
            yield part
            if stop(part):
                return
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(work, lo, hi) for lo, hi in ranges]
        try:
            for fut in futures:
                part = fut.result()
                yield part
                if stop(part):
                    return
        finally:
            for fut in futures:
                fut.cancel()


def _adjacency(g: Digraph) -> np.ndarray:
    # float32 so the subset-count products go through BLAS; counts stay exact.
    return g.adjacency().astype(np.float32)


def _bit_rows(masks: np.ndarray, n: int) -> np.ndarray:
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def _pair_rows(strategy: Strategy, n: int, lo: int, hi: int):
    """Membership rows for states ``lo..hi-1``: (state index, in S1, in S2)."""
    idx = np.arange(lo, hi, dtype=np.int64)
    if strategy is Strategy.PARTITIONS:
        # node 0 is always in S1; S1 <-> S2 symmetry covers the rest
        in1 = _bit_rows(2 * idx + 1, n)
        return idx, in1, ~in1
    digits = (idx[:, None] // (3 ** np.arange(n, dtype=np.int64))) % 3
    in1 = digits == 1
    in2 = digits == 2
    # both predicates are symmetric in (S1, S2): keep the orientation whose
    # lowest-numbered member lies in S1
    lead = digits[np.arange(len(idx)), (digits != 0).argmax(axis=1)]
    keep = (lead == 1) & in2.any(axis=1)
    return idx[keep], in1[keep], in2[keep]


def _outside_counts(in1: np.ndarray, in2: np.ndarray, adj: np.ndarray):
    out1 = (~in1).astype(np.float32) @ adj
    out2 = (~in2).astype(np.float32) @ adj
    return out1, out2


def _pair_scores(in1, in2, adj) -> np.ndarray:
    """Largest own-set outside in-degree over the members of each pair.

    A pair witnesses failure of r-robustness exactly when its score is < r.
    """
    out1, out2 = _outside_counts(in1, in2, adj)
    s1 = np.where(in1, out1, -1.0).max(axis=1)
    s2 = np.where(in2, out2, -1.0).max(axis=1)
    return np.maximum(s1, s2).astype(np.int64)


def _to_pair(n: int, m1: int, m2: int) -> SubsetPair:
    return SubsetPair(NodeSubset(m1, n), NodeSubset(m2, n))


def _row_masks(in1_row: np.ndarray, in2_row: np.ndarray) -> tuple[int, int]:
    m1 = sum(1 << int(v) for v in np.flatnonzero(in1_row))
    m2 = sum(1 << int(v) for v in np.flatnonzero(in2_row))
    return m1, m2


def _first_pair_below(g, strategy, adj, r, lo, hi):
    idx, in1, in2 = _pair_rows(strategy, g.n, lo, hi)
    if idx.size == 0:
        return None
    hits = np.flatnonzero(_pair_scores(in1, in2, adj) < r)
    if hits.size == 0:
        return None
    row = hits[0]
    return _to_pair(g.n, *_row_masks(in1[row], in2[row]))


def _min_score(g, strategy, adj, lo, hi):
    idx, in1, in2 = _pair_rows(strategy, g.n, lo, hi)
    if idx.size == 0:
        return None
    scores = _pair_scores(in1, in2, adj)
    row = int(np.argmin(scores))  # first occurrence of the minimum
    return int(scores[row]), _to_pair(g.n, *_row_masks(in1[row], in2[row]))


def _largest_closed_subsets(out_of: np.ndarray, adj: np.ndarray, r: int) -> np.ndarray:
    """Row-wise largest r-closed subset of each candidate set in ``out_of``."""
    keep = out_of.copy()
    while True:
        outside = (~keep).astype(np.float32) @ adj
        nxt = keep & (outside < r)
        if np.array_equal(nxt, keep):
            return keep
        keep = nxt


def _first_peeling_witness(g, adj, r, lo, hi):
    masks = np.arange(lo, hi, dtype=np.int64) + 1  # nonempty proper subsets
    in1 = _bit_rows(masks, g.n)
    outside = (~in1).astype(np.float32) @ adj
    closed = np.all(~in1 | (outside < r), axis=1)
    if not closed.any():
        return None
    in1 = in1[closed]
    rest = _largest_closed_subsets(~in1, adj, r)
    hits = np.flatnonzero(rest.any(axis=1))
    if hits.size == 0:
        return None
    row = hits[0]
    return _to_pair(g.n, *_row_masks(in1[row], rest[row]))


# ---------------------------------------------------------------------------
# Public checkers
# ---------------------------------------------------------------------------


def is_r_robust(
    g: Digraph,
    r: int,
    strategy: Strategy | str = Strategy.PEELING,
    workers: int | None = None,
) -> tuple[bool, SubsetPair | None]:
    """Return ``(robust, witness)``; the witness is the first failing pair in scan order."""
    strategy = Strategy(strategy)
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    _check_budget(g.n, strategy)
    if r == 0 or g.n < 2:
        return True, None
    adj = _adjacency(g)
    total = _state_count(g.n, strategy)
    if strategy is Strategy.PEELING:
        work = lambda lo, hi: _first_peeling_witness(g, adj, r, lo, hi)  # noqa: E731
    else:
        work = lambda lo, hi: _first_pair_below(g, strategy, adj, r, lo, hi)  # noqa: E731
    for witness in _scan(total, work, workers, stop=lambda w: w is not None):
        if witness is not None:
            return False, witness
    return True, None


def max_r_robustness(
    g: Digraph,
    strategy: Strategy | str = Strategy.PEELING,
    workers: int | None = None,
) -> RobustnessReport:
    """Largest r for which ``g`` is r-robust, with a witness for ``r + 1``.

    The peeling strategy ascends r one level at a time. The two pair
    enumerations get every level from a single pass: the answer is the
    minimum pair score, and the first pair attaining it is exactly the first
    witness the ``max_r + 1`` check would find.
    """
    strategy = Strategy(strategy)
    if g.n < 2:
        raise ValueError("robustness is only defined for graphs with n >= 2")
    _check_budget(g.n, strategy)
    cap = math.ceil(g.n / 2)
    if strategy is Strategy.PEELING:
        r = 0
        while True:
            robust, witness = is_r_robust(g, r + 1, strategy, workers)
            if not robust:
                return RobustnessReport(r, witness, strategy)
            r += 1
            if r > cap:
                raise AssertionError(f"graph reported {r}-robust with n={g.n}")
    adj = _adjacency(g)
    best: tuple[int, SubsetPair] | None = None
    work = lambda lo, hi: _min_score(g, strategy, adj, lo, hi)  # noqa: E731
    for part in _scan(_state_count(g.n, strategy), work, workers):
        if part is not None and (best is None or part[0] < best[0]):
            best = part
    assert best is not None
    return RobustnessReport(best[0], best[1], strategy)


def _first_rs_violation(g, adj, r, s, lo, hi):
    idx, in1, in2 = _pair_rows(Strategy.FULL_PAIRS, g.n, lo, hi)
    if idx.size == 0:
        return None
    out1, out2 = _outside_counts(in1, in2, adj)
    x1 = (in1 & (out1 >= r)).sum(axis=1)
    x2 = (in2 & (out2 >= r)).sum(axis=1)
    bad = (x1 < in1.sum(axis=1)) & (x2 < in2.sum(axis=1)) & (x1 + x2 < s)
    hits = np.flatnonzero(bad)
    if hits.size == 0:
        return None
    row = hits[0]
    return _to_pair(g.n, *_row_masks(in1[row], in2[row])), int(x1[row]), int(x2[row])


def is_rs_robust(g: Digraph, r: int, s: int, workers: int | None = None) -> RsReport:
    """Check (r,s)-robustness over every nonempty disjoint pair.

    The third condition counts reachable members across both sets, so pairs
    that do not cover V matter and the full enumeration is required.
    """
    if r < 0:
        raise ValueError(f"r must be non-negative, got {r}")
    if not 1 <= s <= g.n:
        raise ValueError(f"s={s} outside [1, {g.n}]")
    _check_budget(g.n, Strategy.FULL_PAIRS)
    if g.n < 2:
        return RsReport(r, s, True)
    adj = _adjacency(g)
    work = lambda lo, hi: _first_rs_violation(g, adj, r, s, lo, hi)  # noqa: E731
    for hit in _scan(3**g.n, work, workers, stop=lambda h: h is not None):
        if hit is not None:
            pair, x1, x2 = hit
            return RsReport(r, s, False, pair, x1, x2)
    return RsReport(r, s, True)


def max_f_local_tolerance(
    g: Digraph,
    strategy: Strategy | str = Strategy.PEELING,
    workers: int | None = None,
) -> int:
    """Largest F with the graph (2F+1)-robust; 0 when not even 1-robust."""
    max_r = max_r_robustness(g, strategy, workers).max_r
    return max(0, (max_r - 1) // 2)
