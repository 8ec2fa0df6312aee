"""Decomposition models: k-bags, tree-decompositions and quotient maps."""

from __future__ import annotations

import hashlib
import itertools
from collections import defaultdict
from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property
from typing import Any

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, model_validator

from span_decomp.exceptions import PreconditionError
from span_decomp.models.structure import Structure

NO_MARK = -1
_MAX_CANONICAL_LEAVES = 40_320


@dataclass(frozen=True, order=True)
class BagClass:
    """Isomorphism class of a k-bag, named by its canonical key."""

    key: tuple[Any, ...]

    @cached_property
    def digest(self) -> str:
        """Short stable name for the class."""
        return hashlib.sha256(repr(self.key).encode()).hexdigest()[:12]


class KBag(BaseModel):
    """A bag: small structure over local ids plus interface marks.

    ``in_marks`` and ``out_marks`` map an index to the local element it
    marks. ``origins`` optionally records, per local id, the element of the
    decomposed structure; it is provenance only and never part of the class.
    """

    model_config = ConfigDict(frozen=True)

    content: Structure
    in_marks: dict[int, int] = Field(default_factory=dict)
    out_marks: dict[int, int] = Field(default_factory=dict)
    origins: tuple[int, ...] | None = Field(default=None)

    @model_validator(mode="after")
    def check_marks(self) -> KBag:
        """Bags are non-empty and marks injective."""
        if self.content.size < 1:
            msg = "a bag is never empty"
            raise ValueError(msg)
        for kind, marks in (("in", self.in_marks), ("out", self.out_marks)):
            if any(i < 0 for i in marks):
                msg = f"negative {kind}-mark index"
                raise ValueError(msg)
            if any(not 0 <= x < self.content.size for x in marks.values()):
                msg = f"{kind}-mark on unknown local element"
                raise ValueError(msg)
            if len(set(marks.values())) != len(marks):
                msg = f"two {kind}-mark indices on one element"
                raise ValueError(msg)
        if self.origins is not None and len(self.origins) != self.content.size:
            msg = "origins must list one element per local id"
            raise ValueError(msg)
        return self

    @property
    def size(self) -> int:
        """Number of local elements."""
        return self.content.size

    def in_index(self, local: int) -> int:
        """In-mark index on a local element, NO_MARK if none."""
        return next((i for i, x in self.in_marks.items() if x == local), NO_MARK)

    def out_index(self, local: int) -> int:
        """Out-mark index on a local element, NO_MARK if none."""
        return next((i for i, x in self.out_marks.items() if x == local), NO_MARK)

    @cached_property
    def bag_class(self) -> BagClass:
        """Canonical class: least encoding over the leaves of an individualization-refinement search.

        Raises:
            PreconditionError: If the bag is too symmetric to canonicalize
        """
        content = self.content
        degree: dict[int, list[str]] = defaultdict(list)
        for name in content.vocabulary.names:
            for tup in content.tuples(name):
                if len(tup) > 1:
                    for x in tup:
                        degree[x].append(name)
        invariant = {
            x: (
                tuple(sorted(content.colors(x))),
                self.in_index(x),
                self.out_index(x),
                tuple(sorted(degree[x])),
            )
            for x in content.elements
        }
        order = sorted(content.elements, key=lambda x: invariant[x])
        cells = [list(g) for _, g in itertools.groupby(order, key=lambda x: invariant[x])]
        wide = [
            (name, content.is_symmetric(name), tuples)
            for name in sorted(content.relations)
            if (tuples := content.tuples(name)) and len(next(iter(tuples))) > 1
        ]
        best = _CanonicalSearch(wide, content.size).least(cells)
        key = (content.size, tuple(invariant[x] for x in order), best)
        return BagClass(key=key)


class _CanonicalSearch:
    """Individualization-refinement over the ordered cells of one bag."""

    def __init__(self, wide: list[tuple[str, bool, frozenset[tuple[int, ...]]]], size: int) -> None:
        self.wide = wide
        self.incident: dict[int, list[tuple[str, bool, tuple[int, ...]]]] = {x: [] for x in range(size)}
        for name, sym, tuples in wide:
            for tup in tuples:
                for x in set(tup):
                    self.incident[x].append((name, sym, tup))
        self.leaves = 0

    def refine(self, cells: list[list[int]]) -> list[list[int]]:
        while True:
            cell_of = {x: i for i, cell in enumerate(cells) for x in cell}

            def signature(x: int) -> tuple[Any, ...]:
                seen = []
                for name, sym, tup in self.incident[x]:
                    where = tuple(cell_of[y] for y in tup)
                    if sym:
                        seen.append((name, -1, tuple(sorted(where))))
                    else:
                        seen.append((name, tuple(i for i, y in enumerate(tup) if y == x), where))
                return tuple(sorted(seen))

            split: list[list[int]] = []
            for cell in cells:
                ranked = sorted(cell, key=signature)
                split.extend(list(g) for _, g in itertools.groupby(ranked, key=signature))
            if len(split) == len(cells):
                return cells
            cells = split

    def encode(self, flat: list[int]) -> tuple[Any, ...]:
        pos = {x: i for i, x in enumerate(flat)}
        return tuple(
            (
                name,
                tuple(
                    sorted(
                        tuple(sorted(pos[x] for x in tup)) if sym else tuple(pos[x] for x in tup)
                        for tup in tuples
                    )
                ),
            )
            for name, sym, tuples in self.wide
        )

    def swaps(self, x: int, y: int) -> bool:
        """Whether exchanging x and y preserves every relation."""
        swap = {x: y, y: x}
        for _, sym, tuples in self.wide:
            for tup in tuples:
                image = tuple(swap.get(z, z) for z in tup)
                if (tuple(sorted(image)) if sym else image) not in tuples:
                    return False
        return True

    def least(self, cells: list[list[int]]) -> tuple[Any, ...]:
        cells = self.refine(cells)
        target = next((i for i, cell in enumerate(cells) if len(cell) > 1), None)
        if target is None:
            self.leaves += 1
            if self.leaves > _MAX_CANONICAL_LEAVES:
                msg = f"bag is too symmetric to canonicalize within {_MAX_CANONICAL_LEAVES} leaves"
                raise PreconditionError(msg)
            return self.encode([x for cell in cells for x in cell])
        found: list[tuple[Any, ...]] = []
        tried: list[int] = []
        for x in cells[target]:
            if any(self.swaps(x, y) for y in tried):
                continue
            tried.append(x)
            rest = [y for y in cells[target] if y != x]
            found.append(self.least([*cells[:target], [x], rest, *cells[target + 1 :]]))
        return min(found)


class Condition(StrEnum):
    """Validity condition a decomposition can violate."""

    TREE_SHAPE = "tree-shape"
    INTERFACE = "interface"
    ROOT_IN_MARK = "root-in-mark"
    BAG_SIZE = "bag-size"
    MARK_INDEX = "mark-index"


class Violation(BaseModel):
    """One failed validity condition."""

    model_config = ConfigDict(frozen=True)

    node: int | None = Field(default=None)
    condition: Condition
    index: int | None = Field(default=None)
    detail: str = Field(default="")


class TreeDecomposition(BaseModel):
    """Rooted tree whose nodes carry k-bags."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=0)
    parent: dict[int, int | None]
    bags: dict[int, KBag]

    @model_validator(mode="after")
    def check_nodes(self) -> TreeDecomposition:
        """Every node has a parent entry and a bag."""
        if set(self.parent) != set(self.bags):
            msg = "parent and bags must cover the same nodes"
            raise ValueError(msg)
        if not self.parent:
            msg = "a decomposition has at least one node"
            raise ValueError(msg)
        return self

    @property
    def nodes(self) -> list[int]:
        """Node ids in ascending order."""
        return sorted(self.parent)

    @cached_property
    def children(self) -> dict[int, list[int]]:
        """Children per node, ascending."""
        found: dict[int, list[int]] = {t: [] for t in self.parent}
        for t in self.nodes:
            up = self.parent[t]
            if up is not None and up in found:
                found[up].append(t)
        return found

    @cached_property
    def roots(self) -> list[int]:
        """Nodes without a parent."""
        return [t for t in self.nodes if self.parent[t] is None]

    @property
    def root(self) -> int:
        """The unique root; the least root when the shape is broken."""
        return self.roots[0] if self.roots else self.nodes[0]

    @cached_property
    def tree(self) -> nx.Graph:
        """Undirected tree over the nodes."""
        graph = nx.Graph()
        graph.add_nodes_from(self.nodes)
        graph.add_edges_from((t, up) for t, up in self.parent.items() if up is not None and up in self.parent)
        return graph

    def distances_from(self, node: int) -> dict[int, int]:
        """Tree distances from one node to every node it reaches."""
        return dict(nx.single_source_shortest_path_length(self.tree, node))

    def distances_to_set(self, nodes: frozenset[int] | set[int]) -> dict[int, int]:
        """Tree distance from every node to the nearest of the given nodes."""
        return dict(nx.multi_source_dijkstra_path_length(self.tree, set(nodes)))


class QuotientMap(BaseModel):
    """Global class of every (node, local element) pair."""

    model_config = ConfigDict(frozen=True)

    classes: dict[tuple[int, int], int]

    @cached_property
    def occurrences(self) -> dict[int, frozenset[int]]:
        """Nodes whose bag holds a member of each class."""
        found: dict[int, set[int]] = defaultdict(set)
        for (node, _), cls in self.classes.items():
            found[cls].add(node)
        return {cls: frozenset(nodes) for cls, nodes in found.items()}

    @cached_property
    def members(self) -> dict[int, list[tuple[int, int]]]:
        """(node, local) pairs of each class, sorted."""
        found: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for pair, cls in sorted(self.classes.items()):
            found[cls].append(pair)
        return dict(found)

    @property
    def class_count(self) -> int:
        """Number of classes."""
        return len(self.occurrences)


class Occurrences(BaseModel):
    """Occurrence set of one class and its diameter in the tree."""

    model_config = ConfigDict(frozen=True)

    nodes: frozenset[int]
    diameter: int = Field(..., ge=0)


class ClassicalDecomposition(BaseModel):
    """Tree with bags given as subsets of a structure's domain."""

    model_config = ConfigDict(frozen=True)

    parent: dict[int, int | None]
    bags: dict[int, frozenset[int]]

    @model_validator(mode="after")
    def check_nodes(self) -> ClassicalDecomposition:
        """Every node has a parent entry and a bag."""
        if set(self.parent) != set(self.bags) or not self.parent:
            msg = "parent and bags must cover the same non-empty node set"
            raise ValueError(msg)
        return self

    @classmethod
    def path(cls, bags: list[frozenset[int]]) -> ClassicalDecomposition:
        """Path decomposition rooted at the first bag."""
        return cls(
            parent={i: (i - 1 if i else None) for i in range(len(bags))},
            bags=dict(enumerate(bags)),
        )

    @property
    def width(self) -> int:
        """Largest bag size minus one."""
        return max(len(b) for b in self.bags.values()) - 1
