import networkx as nx
import pytest

from circulant_robustness.connectivity import (
    build_connectivity_counterexample,
    counterexample_groups,
    underlying_vertex_connectivity,
)
from circulant_robustness.graph import Digraph, complete_digraph, make_k_circulant
from circulant_robustness.robustness import Strategy, max_r_robustness, outside_in_degree

from .conftest import random_digraphs


def _nx_connectivity(g: Digraph) -> int:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    if g.n == 1:
        return 0
    return nx.node_connectivity(h)


@pytest.mark.parametrize("n", range(2, 8))
def test_complete_graph(n):
    assert underlying_vertex_connectivity(complete_digraph(n)) == n - 1


def test_two_cycle():
    assert underlying_vertex_connectivity(Digraph(2, [(0, 1), (1, 0)])) == 1


def test_disconnected_and_trivial():
    assert underlying_vertex_connectivity(Digraph(3, [(0, 1)])) == 0
    assert underlying_vertex_connectivity(Digraph(1)) == 0


def test_matches_networkx():
    graphs = random_digraphs(31, 60, 2, 9) + [make_k_circulant(n, k) for n in (7, 10) for k in (1, 2, 3)]
    for g in graphs:
        assert underlying_vertex_connectivity(g) == _nx_connectivity(g), sorted(g.edges)


def test_budget():
    with pytest.raises(ValueError):
        underlying_vertex_connectivity(Digraph(21))


def test_counterexample_properties():
    g = build_connectivity_counterexample()
    assert underlying_vertex_connectivity(g) == 4
    assert _nx_connectivity(g) == 4
    for strategy in Strategy:
        assert max_r_robustness(g, strategy).max_r == 1


def test_counterexample_groups_have_one_outside_in_neighbor():
    g = build_connectivity_counterexample()
    a, b = counterexample_groups()
    assert a.mask & b.mask == 0 and (a.mask | b.mask) == (1 << g.n) - 1
    for group in (a, b):
        assert [outside_in_degree(g, v, group) for v in group] == [1] * len(group)
    u_degrees = [len({j for i, j in g.edges if i == v} | {i for i, j in g.edges if j == v}) for v in range(g.n)]
    assert min(u_degrees) >= 4
