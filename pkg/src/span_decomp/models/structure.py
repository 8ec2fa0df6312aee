"""Relational structure models."""

from __future__ import annotations

from collections import defaultdict
from enum import StrEnum
from functools import cached_property
from typing import Any

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from span_decomp.exceptions import DomainError

COLORS = ("P0", "P1")


class RelationSymbol(BaseModel):
    """A relation symbol with its arity."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(..., min_length=1, max_length=100)
    arity: int = Field(..., ge=1)
    symmetric: bool = Field(default=False)

    @model_validator(mode="after")
    def check_symmetric_arity(self) -> RelationSymbol:
        """Only binary relations may be flagged symmetric."""
        if self.symmetric and self.arity != 2:
            msg = f"symmetric relation {self.name} must be binary"
            raise ValueError(msg)
        return self


class Vocabulary(BaseModel):
    """Finite relational vocabulary without constants."""

    model_config = ConfigDict(frozen=True)

    relations: tuple[RelationSymbol, ...] = Field(default=())

    @field_validator("relations")
    @classmethod
    def check_unique_names(cls, v: tuple[RelationSymbol, ...]) -> tuple[RelationSymbol, ...]:
        """Reject duplicate relation names."""
        names = [r.name for r in v]
        if len(names) != len(set(names)):
            msg = f"duplicate relation names in {names}"
            raise ValueError(msg)
        return v

    @cached_property
    def by_name(self) -> dict[str, RelationSymbol]:
        """Relation symbols keyed by name."""
        return {r.name: r for r in self.relations}

    @property
    def names(self) -> tuple[str, ...]:
        """Relation names in declaration order."""
        return tuple(r.name for r in self.relations)

    def union(self, other: Vocabulary) -> Vocabulary:
        """Merge two vocabularies, keeping the first declaration of a name.

        Raises:
            ValueError: If a shared name is declared with different arities
        """
        merged = list(self.relations)
        for rel in other.relations:
            mine = self.by_name.get(rel.name)
            if mine is None:
                merged.append(rel)
            elif mine.arity != rel.arity:
                msg = f"relation {rel.name} has arity {mine.arity} and {rel.arity}"
                raise ValueError(msg)
        return Vocabulary(relations=tuple(merged))


SIGMA = Vocabulary(
    relations=(
        RelationSymbol(name="E", arity=2, symmetric=True),
        RelationSymbol(name="P0", arity=1),
        RelationSymbol(name="P1", arity=1),
    )
)


class Role(StrEnum):
    """Role of an element inside a generated structure."""

    PLAIN = "plain"
    SOURCE_S = "source-s"
    SOURCE_T = "source-t"
    SOURCE_WORD = "source-word"
    RUN_MEMBER = "run-member"
    LOZ_TREE = "loz-tree"
    LOZ_LEAF = "loz-leaf"
    LOZ_PATH = "loz-path"
    LABEL_PATH = "label-path"
    CONNECTOR = "connector"


class Side(StrEnum):
    """Top or bottom path of a gadget, or tree side of a lozenge."""

    TOP = "top"
    BOTTOM = "bottom"


class Annotation(BaseModel):
    """Generator metadata attached to one element."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    role: Role = Field(default=Role.PLAIN)
    word: str | None = Field(default=None, pattern=r"^[01]*$")
    block: int | None = Field(default=None, ge=0)
    copy_index: int | None = Field(default=None, ge=0, alias="copy")
    side: Side | None = Field(default=None)
    position: int | None = Field(default=None, ge=0)
    run_value: int | None = Field(default=None, ge=0)
    pair: int | None = Field(default=None, ge=0)
    htree: str | None = Field(default=None, pattern=r"^[01]*$")
    index: int | None = Field(default=None, ge=0)

    def compact(self) -> dict[str, Any]:
        """Dump only the fields that are set."""
        return self.model_dump(mode="json", by_alias=True, exclude_none=True)


class Structure(BaseModel):
    """Finite relational structure with element ids 0..size-1.

    Symmetric relations are stored once per unordered pair, as a sorted
    tuple. Unary relations encode colors; P0 and P1 are exclusive.
    """

    model_config = ConfigDict(frozen=True)

    vocabulary: Vocabulary = Field(default=SIGMA)
    size: int = Field(default=0, ge=0)
    relations: dict[str, frozenset[tuple[int, ...]]] = Field(default_factory=dict)
    symmetric_edges: bool = Field(default=True)
    annotations: dict[int, Annotation] = Field(default_factory=dict)

    @model_validator(mode="before")
    @classmethod
    def normalize_symmetric(cls, data: Any) -> Any:
        """Store each symmetric tuple once, sorted."""
        if not isinstance(data, dict) or not data.get("symmetric_edges", True):
            return data
        vocab = data.get("vocabulary", SIGMA)
        if isinstance(vocab, dict):
            vocab = Vocabulary.model_validate(vocab)
        rels = data.get("relations")
        if not isinstance(rels, dict):
            return data
        normalized = dict(rels)
        for rel in vocab.relations:
            if rel.symmetric and rel.name in normalized:
                normalized[rel.name] = frozenset(
                    tuple(sorted(t)) for t in normalized[rel.name]
                )
        return {**data, "relations": normalized}

    @model_validator(mode="after")
    def check_tuples(self) -> Structure:
        """Validate relation names, arities, ids and color exclusivity."""
        vocab = self.vocabulary.by_name
        for name, tuples in self.relations.items():
            if name not in vocab:
                msg = f"relation {name} is not in the vocabulary"
                raise ValueError(msg)
            arity = vocab[name].arity
            for tup in tuples:
                if len(tup) != arity:
                    msg = f"tuple {tup} of {name} does not have arity {arity}"
                    raise ValueError(msg)
                if any(x < 0 or x >= self.size for x in tup):
                    msg = f"tuple {tup} of {name} references an unknown element"
                    raise ValueError(msg)
        if all(c in self.relations for c in COLORS):
            both = self.relations["P0"] & self.relations["P1"]
            if both:
                msg = f"elements {sorted(x for (x,) in both)} carry both P0 and P1"
                raise ValueError(msg)
        for x in self.annotations:
            if x < 0 or x >= self.size:
                msg = f"annotation for unknown element {x}"
                raise ValueError(msg)
        return self

    # ------------------------------------------------------------------
    # Lookups

    @property
    def elements(self) -> range:
        """All element ids."""
        return range(self.size)

    def check_element(self, x: int) -> None:
        """Raise if x is not an element.

        Raises:
            DomainError: If x is out of range
        """
        if not 0 <= x < self.size:
            msg = f"unknown element {x} (size {self.size})"
            raise DomainError(msg)

    def tuples(self, name: str) -> frozenset[tuple[int, ...]]:
        """Stored tuples of a relation, empty if absent."""
        return self.relations.get(name, frozenset())

    def is_symmetric(self, name: str) -> bool:
        """Whether the relation is stored as unordered pairs."""
        rel = self.vocabulary.by_name.get(name)
        return bool(rel and rel.symmetric and self.symmetric_edges)

    def holds(self, name: str, tup: tuple[int, ...]) -> bool:
        """Whether the tuple belongs to the relation."""
        stored = self.tuples(name)
        if tup in stored:
            return True
        return self.is_symmetric(name) and tuple(sorted(tup)) in stored

    @cached_property
    def unary_of(self) -> dict[int, frozenset[str]]:
        """Unary relation names holding at each element."""
        found: dict[int, set[str]] = defaultdict(set)
        for rel in self.vocabulary.relations:
            if rel.arity == 1:
                for (x,) in self.tuples(rel.name):
                    found[x].add(rel.name)
        return {x: frozenset(names) for x, names in found.items()}

    def colors(self, x: int) -> frozenset[str]:
        """Unary relations holding at x."""
        return self.unary_of.get(x, frozenset())

    def color_of(self, x: int) -> str | None:
        """P0, P1 or None."""
        for c in COLORS:
            if c in self.colors(x):
                return c
        return None

    def annotation(self, x: int) -> Annotation:
        """Annotation of x, plain when none was recorded."""
        return self.annotations.get(x) or Annotation()

    @cached_property
    def incidence(self) -> dict[int, tuple[tuple[str, tuple[int, ...]], ...]]:
        """Tuples of arity two or more containing each element.

        Symmetric tuples are listed in both orientations.
        """
        found: dict[int, list[tuple[str, tuple[int, ...]]]] = defaultdict(list)
        for rel in self.vocabulary.relations:
            if rel.arity < 2:
                continue
            sym = self.is_symmetric(rel.name)
            for tup in sorted(self.tuples(rel.name)):
                variants = {tup, tup[::-1]} if sym else {tup}
                for variant in sorted(variants):
                    for x in set(variant):
                        found[x].append((rel.name, variant))
        return {x: tuple(items) for x, items in found.items()}

    @cached_property
    def gaifman(self) -> nx.Graph:
        """Gaifman graph: elements adjacent iff they share a tuple."""
        graph = nx.Graph()
        graph.add_nodes_from(self.elements)
        for rel in self.vocabulary.relations:
            if rel.arity < 2:
                continue
            for tup in self.tuples(rel.name):
                members = sorted(set(tup))
                graph.add_edges_from(
                    (a, b) for i, a in enumerate(members) for b in members[i + 1 :]
                )
        return graph

    def neighbors(self, x: int) -> frozenset[int]:
        """Gaifman neighbours of x."""
        self.check_element(x)
        return frozenset(self.gaifman.adj[x])

    def same_as(self, other: Structure) -> bool:
        """Identical ids, tuples and colors, ignoring annotations."""
        if self.size != other.size:
            return False
        names = set(self.relations) | set(other.relations)
        return all(self.tuples(n) == other.tuples(n) for n in names)

    @property
    def tuple_count(self) -> int:
        """Number of stored tuples over all relations."""
        return sum(len(t) for t in self.relations.values())
