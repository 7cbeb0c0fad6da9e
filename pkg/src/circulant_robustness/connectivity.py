"""Vertex connectivity of the underlying graph, and a digraph showing that it
says little about robustness."""

from __future__ import annotations

from itertools import combinations

from .graph import Digraph, NodeSubset, complete_digraph, underlying_graph
from .robustness import Strategy, max_r_robustness, outside_in_degree

__all__ = [
    "CONNECTIVITY_MAX_N",
    "CounterexampleDefect",
    "build_connectivity_counterexample",
    "counterexample_groups",
    "underlying_vertex_connectivity",
]

CONNECTIVITY_MAX_N = 20

# Two complete groups of four joined by the matching a_i <-> b_i: the
# underlying graph is K4 x K2, whose connectivity is min(3 + 1, 1 * 4) = 4.
_GROUP = 4


class CounterexampleDefect(RuntimeError):
    """The built counterexample does not have the properties it must have."""


def _connected(adj: list[int], alive: int) -> bool:
    if not alive:
        return True
    start = alive & -alive
    seen = start
    frontier = start
    while frontier:
        low = frontier & -frontier
        frontier ^= low
        fresh = adj[low.bit_length() - 1] & alive & ~seen
        seen |= fresh
        frontier |= fresh
    return seen == alive


def underlying_vertex_connectivity(g: Digraph, max_n: int = CONNECTIVITY_MAX_N) -> int:
    """Fewest removals that disconnect the underlying graph or leave one node.

    Brute force over removal sets of increasing size, so ``n`` is capped.
    """
    n = g.n
    if n > max_n:
        raise ValueError(f"n={n} exceeds the brute-force connectivity budget (n <= {max_n})")
    u = underlying_graph(g)
    adj = list(u.in_masks)  # symmetric, so in-masks are the neighbor sets
    full = (1 << n) - 1
    for size in range(0, n - 1):
        for removed in combinations(range(n), size):
            mask = full
            for v in removed:
                mask ^= 1 << v
            if not _connected(adj, mask):
                return size
    return max(n - 1, 0)


def counterexample_groups() -> tuple[NodeSubset, NodeSubset]:
    n = 2 * _GROUP
    return (
        NodeSubset.of(range(_GROUP), n),
        NodeSubset.of(range(_GROUP, n), n),
    )


def build_connectivity_counterexample() -> Digraph:
    """Digraph with 4-connected underlying graph that is only 1-robust.

    Construction is checked on every call; a failed check raises
    :class:`CounterexampleDefect`.
    """
    m = _GROUP
    block = complete_digraph(m).edges
    edges = set(block)
    edges |= {(i + m, j + m) for i, j in block}
    for i in range(m):
        edges.add((m + i, i))
        edges.add((i, m + i))
    g = Digraph(2 * m, edges)

    kappa = underlying_vertex_connectivity(g)
    if kappa != 4:
        raise CounterexampleDefect(f"underlying vertex connectivity is {kappa}, expected 4")
    report = max_r_robustness(g, Strategy.FULL_PAIRS)
    if report.max_r != 1:
        raise CounterexampleDefect(f"max r-robustness is {report.max_r}, expected 1")
    for group in counterexample_groups():
        for v in group:
            if outside_in_degree(g, v, group) != 1:
                raise CounterexampleDefect(f"node {v} does not have exactly one outside in-neighbor")
    return g
