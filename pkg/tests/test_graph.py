import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circulant_robustness.graph import (
    CirculantSpec,
    Digraph,
    GraphFormatError,
    NodeSubset,
    complete_digraph,
    in_neighbors,
    k_circulant_order,
    make_circulant,
    make_k_circulant,
    parse_edge_list,
    serialize_edge_list,
    to_dot,
    underlying_graph,
)


@st.composite
def digraphs(draw, max_n=32):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    if not pairs:
        return Digraph(n)
    edges = draw(st.lists(st.sampled_from(pairs), max_size=min(len(pairs), 80)))
    return Digraph(n, edges)


@st.composite
def circulant_specs(draw):
    n = draw(st.integers(2, 20))
    offsets = draw(st.sets(st.integers(1, n - 1), min_size=1))
    return CirculantSpec(n, tuple(sorted(offsets)))


def test_fig2_three_circulant_on_seven_nodes():
    g = make_circulant(CirculantSpec(7, (1, 2, 3)))
    assert g.n == 7
    assert len(g.edges) == 21
    assert in_neighbors(g, 0).nodes() == [4, 5, 6]


def test_smallest_circulant():
    g = make_circulant(CirculantSpec(2, (1,)))
    assert g.edges == {(0, 1), (1, 0)}


def test_all_offsets_give_complete_digraph():
    g = make_circulant(CirculantSpec(5, (1, 2, 3, 4)))
    assert len(g.edges) == 20
    assert g == complete_digraph(5)


@pytest.mark.parametrize(
    "n, offsets, bad",
    [(7, (2, 1), 1), (7, (1, 1), 1), (7, (0, 1), 0), (7, (1, 7), 7), (7, (), None)],
)
def test_circulant_spec_rejects_bad_offsets(n, offsets, bad):
    with pytest.raises(ValueError) as exc:
        CirculantSpec(n, offsets)
    if bad is not None:
        assert str(bad) in str(exc.value)


def test_k_circulant_d1_in_degrees():
    g = make_k_circulant(15, 6)
    assert all(g.in_degree(v) == 6 for v in range(15))


def test_k_circulant_complete_case():
    for n in range(2, 9):
        assert make_k_circulant(n, n - 1) == complete_digraph(n)


def test_k_circulant_equals_offset_form():
    assert make_k_circulant(7, 3).edges == make_circulant(CirculantSpec(7, (1, 2, 3))).edges


@pytest.mark.parametrize("n, k", [(3, 5), (3, 0), (1, 1), (5, 5)])
def test_k_circulant_range_errors(n, k):
    with pytest.raises(ValueError):
        make_k_circulant(n, k)


def test_k_out_of_range_names_interval():
    with pytest.raises(ValueError, match=r"\[1, 2\]"):
        make_k_circulant(3, 5)


@pytest.mark.parametrize("n", range(2, 12))
def test_k_circulant_in_neighbor_windows(n):
    for k in range(1, n):
        g = make_k_circulant(n, k)
        assert len(g.edges) == n * k
        for i in range(n):
            assert set(in_neighbors(g, i)) == {(i - a) % n for a in range(1, k + 1)}
            assert g.out_degree(i) == k


def test_in_neighbors_edgeless_and_complete():
    assert len(in_neighbors(Digraph(4), 2)) == 0
    assert in_neighbors(complete_digraph(4), 2).nodes() == [0, 1, 3]


def test_in_neighbors_range_check():
    with pytest.raises(ValueError):
        in_neighbors(Digraph(3), 3)


def test_digraph_rejects_bad_edges():
    with pytest.raises(ValueError):
        Digraph(2, [(0, 0)])
    with pytest.raises(ValueError):
        Digraph(2, [(0, 2)])
    with pytest.raises(ValueError):
        Digraph(0)


def test_digraph_is_immutable():
    g = Digraph(2, [(0, 1)])
    with pytest.raises(AttributeError):
        g.n = 3


def test_underlying_graph_examples():
    assert underlying_graph(Digraph(2, [(0, 1)])).edges == {(0, 1), (1, 0)}
    assert underlying_graph(complete_digraph(5)) == complete_digraph(5)
    u = underlying_graph(make_k_circulant(7, 3))
    assert in_neighbors(u, 0).nodes() == [1, 2, 3, 4, 5, 6]


def test_node_subset_basics():
    s = NodeSubset.of([0, 3], 5)
    assert len(s) == 2 and 3 in s and 1 not in s
    assert s.complement().nodes() == [1, 2, 4]
    assert s.rotate(2).nodes() == [0, 2]
    with pytest.raises(ValueError):
        NodeSubset.of([5], 5)
    with pytest.raises(ValueError):
        NodeSubset(1 << 5, 5)


@given(digraphs(max_n=12))
def test_underlying_graph_idempotent_and_symmetric(g):
    u = underlying_graph(g)
    assert underlying_graph(u) == u
    assert all((j, i) in u.edges for i, j in u.edges)
    assert g.edges <= u.edges


@given(circulant_specs())
def test_circulant_rotational_symmetry(spec):
    g = make_circulant(spec)
    n = spec.n
    for j in range(n):
        rotated = {(i + 1) % n for i in in_neighbors(g, j)}
        assert set(in_neighbors(g, (j + 1) % n)) == rotated
    assert all(g.in_degree(v) == len(spec.offsets) == g.out_degree(v) for v in range(n))


@settings(max_examples=200)
@given(digraphs())
def test_edge_list_round_trip(g):
    text = serialize_edge_list(g)
    assert parse_edge_list(text) == g
    assert parse_edge_list(text.encode()) == g
    assert serialize_edge_list(parse_edge_list(text)) == text


def test_parse_two_cycle_with_comments():
    g = parse_edge_list("# a comment\n\nn 2\ne 0 1\n  \ne 1 0\n")
    assert g.edges == {(0, 1), (1, 0)}


def test_serialize_sorted():
    assert serialize_edge_list(make_k_circulant(3, 1)) == "n 3\ne 0 1\ne 1 2\ne 2 0\n"


@pytest.mark.parametrize(
    "text, line",
    [
        ("n 2\ne 0 5\n", 2),
        ("n 2\ne 1 1\n", 2),
        ("n 2\ne 0 1\ne 0 1\n", 3),
        ("n 2\nx 0 1\n", 2),
        ("e 0 1\n", 1),
        ("n two\n", 1),
        ("n 3\ne 0 a\n", 2),
    ],
)
def test_parse_errors_name_line(text, line):
    with pytest.raises(GraphFormatError) as exc:
        parse_edge_list(text)
    assert exc.value.line == line
    assert f"line {line}" in str(exc.value)


def test_parse_missing_header():
    with pytest.raises(GraphFormatError):
        parse_edge_list("# nothing\n")


def test_dot_export():
    dot = to_dot(Digraph(3, [(0, 1)]))
    assert dot.startswith("digraph G {")
    assert "0 -> 1;" in dot and "  2;" in dot


def test_k_circulant_order_detection():
    assert k_circulant_order(make_k_circulant(15, 6)) == 6
    assert k_circulant_order(make_circulant(CirculantSpec(7, (1, 3)))) is None
    assert k_circulant_order(Digraph(3)) is None
