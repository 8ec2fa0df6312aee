"""Ehrenfeucht-Fraisse game search deciding equivalence up to a quantifier rank."""

from __future__ import annotations

from typing import TYPE_CHECKING

from span_decomp.config import get_settings
from span_decomp.exceptions import DomainError
from span_decomp.services.isomorphism import find_isomorphism, refine
from span_decomp.utils import Budget, log_operation

if TYPE_CHECKING:
    from collections.abc import Sequence

    from span_decomp.models.structure import Structure

Pairs = tuple[tuple[int, int], ...]


def extension_type(structure: Structure, picked: Sequence[int], x: int) -> tuple[object, ...]:
    """Atomic type of x over already picked elements.

    Picked elements are referred to by the first index they occupy, x by -1.
    Two extensions of a partial isomorphism keep it a partial isomorphism iff
    their types agree.
    """
    first_index: dict[int, int] = {}
    for i, y in enumerate(picked):
        first_index.setdefault(y, i)
    equal = first_index.get(x, -1)

    def ref(y: int) -> int:
        return -1 if y == x else first_index[y]

    touching = sorted(
        {
            (name, tuple(ref(y) for y in tup))
            for name, tup in structure.incidence.get(x, ())
            if all(y == x or y in first_index for y in tup)
        }
    )
    return (equal, tuple(sorted(structure.colors(x))), tuple(touching))


def is_partial_isomorphism(
    first: Structure, second: Structure, picked_a: Sequence[int], picked_b: Sequence[int]
) -> bool:
    """Whether picked_a[i] -> picked_b[i] preserves and reflects all relations.

    Raises:
        DomainError: If the sequences differ in length or hold unknown ids
    """
    if len(picked_a) != len(picked_b):
        msg = "picked sequences must have equal length"
        raise DomainError(msg)
    for x in picked_a:
        first.check_element(x)
    for y in picked_b:
        second.check_element(y)
    return all(
        extension_type(first, picked_a[:i], picked_a[i]) == extension_type(second, picked_b[:i], picked_b[i])
        for i in range(len(picked_a))
    )


class EFGame:
    """Memoized game search between two fixed structures.

    A position's value depends only on the set of picked pairs, and only up
    to automorphisms of either side. The memo is therefore keyed on rounds
    left and the pebbled isomorphism type of each side: picks are aligned
    by sorting the pairs, and two aligned pick tuples share a type when an
    explicit automorphism maps one onto the other position by position.
    Spoiler moves and Duplicator replies are pruned to one representative
    per orbit of the automorphisms fixing the picked elements. Structures
    above ``orbit_max_size`` fall back to exact positions for both.
    """

    def __init__(
        self,
        first: Structure,
        second: Structure,
        *,
        budget: Budget,
        orbit_max_size: int = 0,
    ) -> None:
        """Initialize the game.

        Args:
            first: Structure A
            second: Structure B
            budget: Node and time budget
            orbit_max_size: Orbit pruning runs on structures up to this size
        """
        self.first = first
        self.second = second
        self.budget = budget
        self.orbit_max_size = orbit_max_size
        self._memo: dict[tuple[int, object, object], bool] = {}
        self._orbits: dict[tuple[int, tuple[int, ...]], list[int]] = {}
        self._types: dict[tuple[int, tuple[int, ...]], object] = {}
        self._seen: dict[tuple[object, ...], list[tuple[tuple[int, ...], object]]] = {}

    @staticmethod
    def _tags(structure: Structure, picked: tuple[int, ...]) -> list[tuple[int, ...]]:
        return [tuple(i for i, y in enumerate(picked) if y == x) for x in structure.elements]

    def position_type(self, side: int, picked: tuple[int, ...]) -> object:
        """Identifier shared by pick tuples related by an automorphism of one side."""
        structure = self.first if side == 0 else self.second
        if structure.size > self.orbit_max_size:
            return picked
        key = (side, picked)
        if key in self._types:
            return self._types[key]
        tags = self._tags(structure, picked)
        palette = {t: n for n, t in enumerate(sorted(set(tags)))}
        base = [palette[t] for t in tags]
        colors, _ = refine(structure, structure, list(base), list(base))
        bucket = (side, len(picked), tuple(sorted(colors)), tuple(colors[y] for y in picked))
        seen = self._seen.setdefault(bucket, [])
        found: object = None
        for other, other_type in seen:
            other_tags = self._tags(structure, other)
            if find_isomorphism(structure, structure, colors1=tags, colors2=other_tags) is not None:
                found = other_type
                break
        if found is None:
            found = (side, picked)
            seen.append((picked, found))
        self._types[key] = found
        return found

    def _representatives(self, side: int, picked: tuple[int, ...]) -> list[int]:
        structure = self.first if side == 0 else self.second
        key = (side, picked)
        if key in self._orbits:
            return self._orbits[key]
        if structure.size > self.orbit_max_size:
            reps = list(structure.elements)
        else:
            reps = self._orbit_representatives(structure, picked)
        self._orbits[key] = reps
        return reps

    def _orbit_representatives(self, structure: Structure, picked: tuple[int, ...]) -> list[int]:
        tags = self._tags(structure, picked)
        palette = {t: n for n, t in enumerate(sorted(set(tags)))}
        base = [palette[t] for t in tags]
        colors, _ = refine(structure, structure, list(base), list(base))
        reps: list[int] = []
        for x in structure.elements:
            merged = False
            for r in reps:
                if colors[r] != colors[x]:
                    continue
                marked_x = [(*t, "x" if y == x else "") for y, t in enumerate(tags)]
                marked_r = [(*t, "x" if y == r else "") for y, t in enumerate(tags)]
                if find_isomorphism(structure, structure, colors1=marked_x, colors2=marked_r) is not None:
                    merged = True
                    break
            if not merged:
                reps.append(x)
        return reps

    def duplicator_wins(self, pairs: Pairs, rounds_left: int) -> bool:
        """Value of a position that is already a partial isomorphism."""
        if rounds_left == 0:
            return True
        aligned = sorted(set(pairs))
        picked_a = tuple(a for a, _ in aligned)
        picked_b = tuple(b for _, b in aligned)
        key = (rounds_left, self.position_type(0, picked_a), self.position_type(1, picked_b))
        if key in self._memo:
            return self._memo[key]
        self.budget.tick()

        types_b: dict[tuple[object, ...], list[int]] = {}
        for y in self.second.elements:
            types_b.setdefault(extension_type(self.second, picked_b, y), []).append(y)
        types_a: dict[tuple[object, ...], list[int]] = {}
        for x in self.first.elements:
            types_a.setdefault(extension_type(self.first, picked_a, x), []).append(x)

        if set(types_a) != set(types_b):
            result = False
        elif rounds_left == 1:
            result = True
        else:
            result = self._forth(pairs, rounds_left, picked_a, types_a, types_b, flip=False) and self._forth(
                pairs, rounds_left, picked_b, types_b, types_a, flip=True
            )
        self._memo[key] = result
        return result

    def _forth(
        self,
        pairs: Pairs,
        rounds_left: int,
        picked: tuple[int, ...],
        mine: dict[tuple[object, ...], list[int]],
        theirs: dict[tuple[object, ...], list[int]],
        *,
        flip: bool,
    ) -> bool:
        side = 1 if flip else 0
        other_picked = tuple((a if flip else b) for a, b in pairs)
        # an orbit never mixes extension types, so its representative is a valid reply
        reply_reps = set(self._representatives(1 - side, other_picked))
        type_of = {x: t for t, xs in mine.items() for x in xs}
        for move in self._representatives(side, picked):
            replies = [y for y in theirs[type_of[move]] if y in reply_reps]
            if not any(
                self.duplicator_wins((*pairs, (reply, move) if flip else (move, reply)), rounds_left - 1)
                for reply in replies
            ):
                return False
        return True


@log_operation("EF equivalence")
def ef_equivalent(
    first: Structure,
    second: Structure,
    rank: int,
    *,
    budget_nodes: int | None = None,
    budget_seconds: float | None = None,
    orbit_max_size: int | None = None,
) -> bool:
    """Whether Duplicator wins the game with the given number of rounds.

    Args:
        first: Structure A
        second: Structure B
        rank: Number of rounds, at least 0
        budget_nodes: Game positions to explore, settings default when None
        budget_seconds: Wall-clock cap, settings default when None
        orbit_max_size: Orbit pruning size cap, settings default when None

    Raises:
        DomainError: If rank is negative
        BudgetExceededError: If the budget runs out; never reported as False
    """
    if rank < 0:
        msg = "rank must be non-negative"
        raise DomainError(msg)
    if rank == 0 or first.same_as(second):
        return True
    settings = get_settings()
    budget = Budget(
        budget_nodes if budget_nodes is not None else settings.budget_nodes,
        budget_seconds if budget_seconds is not None else settings.budget_seconds,
        label="EF game",
    )
    game = EFGame(
        first,
        second,
        budget=budget,
        orbit_max_size=settings.ef_orbit_max_size if orbit_max_size is None else orbit_max_size,
    )
    return game.duplicator_wins((), rank)


def distinguishing_rank(
    first: Structure,
    second: Structure,
    max_rank: int,
    *,
    budget_nodes: int | None = None,
    budget_seconds: float | None = None,
) -> int | None:
    """Least rank at which the structures differ, None if none up to max_rank.

    Equivalence is downward closed in the rank, so a binary search suffices.
    """
    if max_rank < 0:
        msg = "max_rank must be non-negative"
        raise DomainError(msg)

    def equivalent(r: int) -> bool:
        return ef_equivalent(first, second, r, budget_nodes=budget_nodes, budget_seconds=budget_seconds)

    if equivalent(max_rank):
        return None
    low, high = 0, max_rank
    while high - low > 1:
        mid = (low + high) // 2
        if equivalent(mid):
            low = mid
        else:
            high = mid
    return high
