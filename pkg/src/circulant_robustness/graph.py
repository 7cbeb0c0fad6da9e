"""Digraph container, circulant constructors and the edge-list text format.

Nodes are ``0..n-1``. An edge ``(i, j)`` means ``j`` receives from ``i``, so
``i`` is an in-neighbor of ``j``. Every digraph keeps a per-node in-neighbor
bitmask next to its edge set; the robustness checkers only ever touch masks.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

__all__ = [
    "CirculantSpec",
    "Digraph",
    "GraphFormatError",
    "NodeSubset",
    "complete_digraph",
    "in_neighbors",
    "make_circulant",
    "make_k_circulant",
    "parse_edge_list",
    "serialize_edge_list",
    "to_dot",
    "underlying_graph",
]


class GraphFormatError(ValueError):
    """Malformed edge-list text. ``line`` is 1-based, or None for whole-file problems."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class NodeSubset:
    """Set of nodes of an ``n``-node graph stored as a bitmask."""

    mask: int
    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError(f"n must be non-negative, got {self.n}")
        if self.mask < 0 or self.mask >> self.n:
            raise ValueError(f"mask {self.mask:#x} has members outside [0, {self.n})")

    @classmethod
    def of(cls, nodes: Iterable[int], n: int) -> NodeSubset:
        mask = 0
        for v in nodes:
            if not 0 <= v < n:
                raise ValueError(f"node {v} outside [0, {n})")
            mask |= 1 << v
        return cls(mask, n)

    @classmethod
    def full(cls, n: int) -> NodeSubset:
        return cls((1 << n) - 1, n)

    def __iter__(self) -> Iterator[int]:
        return _bits(self.mask)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __contains__(self, v: object) -> bool:
        return isinstance(v, int) and 0 <= v < self.n and bool(self.mask >> v & 1)

    def __bool__(self) -> bool:
        return self.mask != 0

    def nodes(self) -> list[int]:
        return list(_bits(self.mask))

    def complement(self) -> NodeSubset:
        return NodeSubset(((1 << self.n) - 1) ^ self.mask, self.n)

    def rotate(self, shift: int = 1) -> NodeSubset:
        """Relabel every member ``v`` as ``(v + shift) mod n``."""
        return NodeSubset.of(((v + shift) % self.n for v in self), self.n)

    def __repr__(self) -> str:
        return f"NodeSubset({self.nodes()}, n={self.n})"


class Digraph:
    """Immutable simple digraph on nodes ``0..n-1``."""

    __slots__ = ("n", "edges", "in_masks", "out_masks")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 1:
            raise ValueError(f"a digraph needs at least one node, got n={n}")
        in_masks = [0] * n
        out_masks = [0] * n
        edge_set = set()
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) has an endpoint outside [0, {n})")
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            edge_set.add((i, j))
            in_masks[j] |= 1 << i
            out_masks[i] |= 1 << j
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", frozenset(edge_set))
        object.__setattr__(self, "in_masks", tuple(in_masks))
        object.__setattr__(self, "out_masks", tuple(out_masks))

    def __setattr__(self, name, value):
        raise AttributeError("Digraph is immutable")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Digraph(n={self.n}, edges={len(self.edges)})"

    def in_degree(self, j: int) -> int:
        return self.in_masks[j].bit_count()

    def out_degree(self, i: int) -> int:
        return self.out_masks[i].bit_count()

    def in_neighbors(self, j: int) -> NodeSubset:
        return in_neighbors(self, j)

    def out_neighbors(self, i: int) -> NodeSubset:
        self._check_node(i)
        return NodeSubset(self.out_masks[i], self.n)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def adjacency(self):
        """Dense 0/1 matrix ``A`` with ``A[i, j] = 1`` iff ``(i, j)`` is an edge."""
        import numpy as np

        a = np.zeros((self.n, self.n), dtype=np.int8)
        for i, j in self.edges:
            a[i, j] = 1
        return a

    def _check_node(self, v: int) -> None:
        if not 0 <= v < self.n:
            raise ValueError(f"node {v} outside [0, {self.n})")


@dataclass(frozen=True)
class CirculantSpec:
    """Node count plus the offset set ``a_1 < ... < a_m`` of a circulant digraph."""

    n: int
    offsets: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "offsets", tuple(self.offsets))
        if self.n < 2:
            raise ValueError(f"a circulant digraph needs n >= 2, got n={self.n}")
        if not self.offsets:
            raise ValueError("offset list is empty")
        prev = 0
        for a in self.offsets:
            if not 0 < a < self.n:
                raise ValueError(f"offset {a} outside (0, {self.n})")
            if a <= prev:
                raise ValueError(f"offset {a} breaks the strictly increasing order")
            prev = a


def make_circulant(spec: CirculantSpec) -> Digraph:
    n = spec.n
    return Digraph(n, ((i, (i + a) % n) for i in range(n) for a in spec.offsets))


def make_k_circulant(n: int, k: int) -> Digraph:
    """``C_n(1, ..., k)``: node ``i`` receives from ``i-k, ..., i-1`` (mod n)."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got n={n}")
    if not 1 <= k <= n - 1:
        raise ValueError(f"k={k} outside the legal interval [1, {n - 1}] for n={n}")
    return make_circulant(CirculantSpec(n, tuple(range(1, k + 1))))


def complete_digraph(n: int) -> Digraph:
    return Digraph(n, ((i, j) for i in range(n) for j in range(n) if i != j))


def in_neighbors(g: Digraph, j: int) -> NodeSubset:
    g._check_node(j)
    return NodeSubset(g.in_masks[j], g.n)


def underlying_graph(g: Digraph) -> Digraph:
    """Symmetric closure of ``g``, as a digraph with both directions of every edge."""
    return Digraph(g.n, g.edges | {(j, i) for i, j in g.edges})


def k_circulant_order(g: Digraph) -> int | None:
    """Return ``k`` if ``g`` is exactly ``C_n(1..k)``, else None."""
    if g.n < 2:
        return None
    k = g.in_degree(0)
    if not 1 <= k <= g.n - 1:
        return None
    return k if g == make_k_circulant(g.n, k) else None


def serialize_edge_list(g: Digraph) -> str:
    lines = [f"n {g.n}"]
    lines.extend(f"e {i} {j}" for i, j in g.sorted_edges())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str | bytes) -> Digraph:
    """Parse the ``n <count>`` / ``e <src> <dst>`` format.

    ``#`` starts a comment line and blank lines are skipped. Duplicate edges
    are rejected rather than merged.
    """
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    n = None
    edges: list[tuple[int, int]] = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise GraphFormatError("expected header 'n <count>'", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphFormatError(f"node count {parts[1]!r} is not an integer", lineno) from None
            if n < 1:
                raise GraphFormatError(f"node count must be >= 1, got {n}", lineno)
            continue
        if len(parts) != 3 or parts[0] != "e":
            raise GraphFormatError(f"expected 'e <src> <dst>', got {line!r}", lineno)
        try:
            i, j = int(parts[1]), int(parts[2])
        except ValueError:
            raise GraphFormatError(f"non-integer endpoint in {line!r}", lineno) from None
        if not (0 <= i < n and 0 <= j < n):
            raise GraphFormatError(f"endpoint out of range [0, {n}) in {line!r}", lineno)
        if i == j:
            raise GraphFormatError(f"self-loop at node {i}", lineno)
        if (i, j) in seen:
            raise GraphFormatError(f"duplicate edge ({i}, {j})", lineno)
        seen.add((i, j))
        edges.append((i, j))
    if n is None:
        raise GraphFormatError("missing 'n <count>' header")
    return Digraph(n, edges)


def to_dot(g: Digraph, name: str = "G") -> str:
    body = "".join(f"  {i} -> {j};\n" for i, j in g.sorted_edges())
    isolated = [v for v in range(g.n) if not g.in_masks[v] and not g.out_masks[v]]
    body += "".join(f"  {v};\n" for v in isolated)
    return f"digraph {name} {{\n{body}}}\n"
