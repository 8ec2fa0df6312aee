"""Brute-force rank-r type enumeration, used to cross-check the game engine."""

from __future__ import annotations

import itertools
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from collections.abc import Sequence

    from span_decomp.models.structure import Structure


class TypeOracle:
    """Computes interned rank-r types of tuples in small structures.

    The rank-0 type of a tuple lists its equalities and, for every relation,
    which index tuples hold. The rank-(r+1) type pairs the rank-0 type with
    the set of rank-r types of all one-element extensions. Types are interned
    into integers shared by every structure passed to the same oracle.
    """

    def __init__(self, relation_names: Sequence[tuple[str, int]]) -> None:
        """Initialize the oracle.

        Args:
            relation_names: (name, arity) pairs considered by atomic types
        """
        self.relations = sorted(relation_names)
        self._intern: dict[object, int] = {}

    @classmethod
    def for_structures(cls, *structures: Structure) -> TypeOracle:
        """Oracle over the union of the structures' vocabularies."""
        found: dict[str, int] = {}
        for s in structures:
            for rel in s.vocabulary.relations:
                found[rel.name] = rel.arity
        return cls(list(found.items()))

    def _id(self, value: object) -> int:
        return self._intern.setdefault(value, len(self._intern))

    def atomic_type(self, structure: Structure, picked: Sequence[int]) -> int:
        """Interned quantifier-free type of the picked tuple."""
        m = len(picked)
        equalities = tuple(picked[i] == picked[j] for i in range(m) for j in range(m))
        facts = []
        for name, arity in self.relations:
            holding = tuple(
                idx
                for idx in itertools.product(range(m), repeat=arity)
                if structure.holds(name, tuple(picked[i] for i in idx))
            )
            facts.append((name, holding))
        return self._id(("atomic", equalities, tuple(facts)))

    def rank_type(self, structure: Structure, picked: tuple[int, ...], rank: int) -> int:
        """Interned rank-r type of the picked tuple."""
        base = self.atomic_type(structure, picked)
        if rank == 0:
            return base
        extensions = frozenset(self.rank_type(structure, (*picked, x), rank - 1) for x in structure.elements)
        return self._id(("rank", rank, base, extensions))

    def equivalent(self, first: Structure, second: Structure, rank: int) -> bool:
        """Whether both structures have the same rank-r sentence type."""
        return self.rank_type(first, (), rank) == self.rank_type(second, (), rank)


def oracle_equivalent(first: Structure, second: Structure, rank: int) -> bool:
    """Decide equivalence at the given rank by exhaustive type enumeration."""
    return TypeOracle.for_structures(first, second).equivalent(first, second, rank)
