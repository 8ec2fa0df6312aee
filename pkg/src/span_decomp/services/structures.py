"""Structure construction and graph-theoretic primitives."""

from __future__ import annotations

import math
from collections import defaultdict
from typing import TYPE_CHECKING

import networkx as nx

from span_decomp.exceptions import DomainError
from span_decomp.models.structure import (
    SIGMA,
    Annotation,
    RelationSymbol,
    Structure,
    Vocabulary,
)

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

INFINITY = math.inf

LINEAR_ORDER_VOCABULARY = Vocabulary(relations=(RelationSymbol(name="LT", arity=2),))


class StructureBuilder:
    """Mutable accumulator producing an immutable Structure.

    Element ids are handed out densely in creation order.
    """

    def __init__(self, vocabulary: Vocabulary = SIGMA, *, symmetric_edges: bool = True) -> None:
        """Initialize an empty builder.

        Args:
            vocabulary: Relation symbols of the result
            symmetric_edges: Whether symmetric relations are stored once
        """
        self.vocabulary = vocabulary
        self.symmetric_edges = symmetric_edges
        self.size = 0
        self._relations: dict[str, set[tuple[int, ...]]] = defaultdict(set)
        self._annotations: dict[int, Annotation] = {}

    def add_element(self, color: str | None = None, annotation: Annotation | None = None) -> int:
        """Add a fresh element and return its id."""
        x = self.size
        self.size += 1
        if color is not None:
            self._relations[color].add((x,))
        if annotation is not None:
            self._annotations[x] = annotation
        return x

    def add_tuple(self, name: str, *elements: int) -> None:
        """Add one tuple to a relation."""
        if self.symmetric_edges and self.vocabulary.by_name[name].symmetric:
            elements = tuple(sorted(elements))
        self._relations[name].add(tuple(elements))

    def add_edge(self, a: int, b: int) -> None:
        """Add an undirected E edge."""
        self.add_tuple("E", a, b)

    def add_path(
        self, start: int, end: int, length: int, annotate: Mapping[int, Annotation] | None = None
    ) -> list[int]:
        """Join start to end by a path with the given number of edges.

        Args:
            start: First endpoint
            end: Last endpoint
            length: Number of edges, at least 1
            annotate: Annotation per internal position 1..length-1

        Returns:
            The full node sequence start..end
        """
        nodes = [start]
        for pos in range(1, length):
            ann = annotate.get(pos) if annotate else None
            nodes.append(self.add_element(annotation=ann))
        nodes.append(end)
        for a, b in zip(nodes, nodes[1:], strict=False):
            self.add_edge(a, b)
        return nodes

    def set_annotation(self, x: int, annotation: Annotation) -> None:
        """Replace the annotation of x."""
        self._annotations[x] = annotation

    def build(self) -> Structure:
        """Freeze the accumulated content."""
        return Structure(
            vocabulary=self.vocabulary,
            size=self.size,
            relations={name: frozenset(tuples) for name, tuples in self._relations.items() if tuples},
            symmetric_edges=self.symmetric_edges,
            annotations=dict(self._annotations),
        )

    @classmethod
    def extending(cls, structure: Structure) -> StructureBuilder:
        """Start a builder holding a copy of an existing structure."""
        builder = cls(structure.vocabulary, symmetric_edges=structure.symmetric_edges)
        builder.size = structure.size
        for name, tuples in structure.relations.items():
            builder._relations[name] = set(tuples)
        builder._annotations = dict(structure.annotations)
        return builder


def gaifman_distance(structure: Structure, x: int, y: int) -> float:
    """Shortest-path distance in the Gaifman graph.

    Returns:
        Number of edges, or math.inf when x and y are disconnected

    Raises:
        DomainError: If x or y is not an element
    """
    structure.check_element(x)
    structure.check_element(y)
    try:
        return nx.shortest_path_length(structure.gaifman, x, y)
    except nx.NetworkXNoPath:
        return INFINITY


def degree(structure: Structure, x: int) -> int:
    """Number of distinct Gaifman neighbours of x."""
    structure.check_element(x)
    return structure.gaifman.degree[x]


def max_degree(structure: Structure) -> int:
    """Largest Gaifman degree, 0 for an empty structure."""
    return max((d for _, d in structure.gaifman.degree), default=0)


def diameter(structure: Structure) -> float:
    """Largest finite distance inside a component, inf if disconnected."""
    if structure.size == 0:
        return 0
    if not nx.is_connected(structure.gaifman):
        return INFINITY
    return nx.diameter(structure.gaifman)


def connected_components(structure: Structure) -> list[list[int]]:
    """Partition of the domain into Gaifman components.

    Components are sorted internally and ordered by least element.
    """
    parts = [sorted(c) for c in nx.connected_components(structure.gaifman)]
    return sorted(parts, key=lambda c: c[0])


def _union_vocabulary(first: Structure, second: Structure) -> Vocabulary:
    return first.vocabulary.union(second.vocabulary)


def disjoint_union(first: Structure, second: Structure) -> Structure:
    """Union with the second structure's ids shifted past the first's."""
    builder = StructureBuilder(
        _union_vocabulary(first, second),
        symmetric_edges=first.symmetric_edges and second.symmetric_edges,
    )
    for offset, part in ((0, first), (first.size, second)):
        for x in part.elements:
            builder.add_element(annotation=part.annotations.get(x))
        for name, tuples in part.relations.items():
            for tup in tuples:
                builder.add_tuple(name, *(x + offset for x in tup))
    return builder.build()


def induced_substructure(structure: Structure, elements: Iterable[int]) -> tuple[Structure, list[int]]:
    """Restrict to a subset of elements, renumbered in ascending order.

    Returns:
        The substructure and the list mapping new ids to old ids

    Raises:
        DomainError: If an element is unknown
    """
    kept = sorted(set(elements))
    for x in kept:
        structure.check_element(x)
    new_id = {old: new for new, old in enumerate(kept)}
    relations = {
        name: frozenset(tuple(new_id[x] for x in tup) for tup in tuples if all(x in new_id for x in tup))
        for name, tuples in structure.relations.items()
    }
    sub = Structure(
        vocabulary=structure.vocabulary,
        size=len(kept),
        relations={n: t for n, t in relations.items() if t},
        symmetric_edges=structure.symmetric_edges,
        annotations={new_id[x]: a for x, a in structure.annotations.items() if x in new_id},
    )
    return sub, kept


def relabel(structure: Structure, mapping: Mapping[int, int]) -> Structure:
    """Rename elements by a bijection onto 0..size-1.

    Raises:
        DomainError: If the mapping is not a permutation of the domain
    """
    if sorted(mapping) != list(structure.elements) or sorted(mapping.values()) != list(structure.elements):
        msg = "relabelling must be a permutation of the domain"
        raise DomainError(msg)
    return Structure(
        vocabulary=structure.vocabulary,
        size=structure.size,
        relations={
            name: frozenset(tuple(mapping[x] for x in tup) for tup in tuples)
            for name, tuples in structure.relations.items()
        },
        symmetric_edges=structure.symmetric_edges,
        annotations={mapping[x]: a for x, a in structure.annotations.items()},
    )


# ----------------------------------------------------------------------
# Small named structures


def empty_structure(vocabulary: Vocabulary = SIGMA) -> Structure:
    """Structure with no elements."""
    return Structure(vocabulary=vocabulary, size=0)


def linear_order(size: int) -> Structure:
    """Strict linear order 0 < 1 < ... < size-1 over the LT vocabulary."""
    return Structure(
        vocabulary=LINEAR_ORDER_VOCABULARY,
        size=size,
        relations={"LT": frozenset((i, j) for i in range(size) for j in range(i + 1, size))} if size > 1 else {},
        symmetric_edges=False,
    )


def undirected_path(size: int, colors: Iterable[str | None] | None = None) -> Structure:
    """Path on size nodes with optional per-node colors."""
    builder = StructureBuilder()
    palette = list(colors) if colors is not None else [None] * size
    nodes = [builder.add_element(color=palette[i]) for i in range(size)]
    for a, b in zip(nodes, nodes[1:], strict=False):
        builder.add_edge(a, b)
    return builder.build()


def cycle(size: int) -> Structure:
    """Undirected cycle on at least three nodes."""
    if size < 3:  # noqa: PLR2004
        msg = "a cycle needs at least 3 nodes"
        raise DomainError(msg)
    builder = StructureBuilder()
    for _ in range(size):
        builder.add_element()
    for i in range(size):
        builder.add_edge(i, (i + 1) % size)
    return builder.build()


def colored_point(color: str | None) -> Structure:
    """Single element, optionally colored."""
    builder = StructureBuilder()
    builder.add_element(color=color)
    return builder.build()


def from_edges(size: int, edges: Iterable[tuple[int, int]], colors: Mapping[int, str] | None = None) -> Structure:
    """Colored graph over the default vocabulary."""
    builder = StructureBuilder()
    for x in range(size):
        builder.add_element(color=(colors or {}).get(x))
    for a, b in edges:
        builder.add_edge(a, b)
    return builder.build()
