"""Isomorphism testing by color refinement and individualization.

Both structures are refined jointly so that color ids are comparable
across them. A branch individualizes one element of the smallest
non-singleton cell on each side and refines again; leaves are verified
tuple by tuple.
"""

from __future__ import annotations

from collections import Counter
from typing import TYPE_CHECKING

from span_decomp.utils.budget import Budget

if TYPE_CHECKING:
    from collections.abc import Hashable, Sequence

    from span_decomp.models.structure import Structure

Coloring = list[int]


def _relation_names(first: Structure, second: Structure) -> list[str]:
    return sorted(set(first.vocabulary.names) | set(second.vocabulary.names))


def _initial_colors(
    first: Structure,
    second: Structure,
    extra1: Sequence[Hashable] | None,
    extra2: Sequence[Hashable] | None,
) -> tuple[Coloring, Coloring]:
    def key(structure: Structure, extra: Sequence[Hashable] | None, x: int) -> tuple[object, ...]:
        loops = tuple(
            sorted((name, tup.count(x)) for name, tup in structure.incidence.get(x, ()) if len(set(tup)) == 1)
        )
        tag = repr(extra[x]) if extra is not None else ""
        return (tuple(sorted(structure.colors(x))), loops, tag)

    keys1 = [key(first, extra1, x) for x in first.elements]
    keys2 = [key(second, extra2, x) for x in second.elements]
    palette = {k: i for i, k in enumerate(sorted(set(keys1) | set(keys2)))}
    return [palette[k] for k in keys1], [palette[k] for k in keys2]


def _signature(structure: Structure, colors: Coloring, x: int) -> tuple[object, ...]:
    around = sorted(
        (name, tuple(i for i, y in enumerate(tup) if y == x), tuple(colors[y] for y in tup))
        for name, tup in structure.incidence.get(x, ())
    )
    return (colors[x], tuple(around))


def refine(first: Structure, second: Structure, colors1: Coloring, colors2: Coloring) -> tuple[Coloring, Coloring]:
    """Iterate joint color refinement until the partition is stable."""
    while True:
        sig1 = [_signature(first, colors1, x) for x in first.elements]
        sig2 = [_signature(second, colors2, x) for x in second.elements]
        palette = {s: i for i, s in enumerate(sorted(set(sig1) | set(sig2)))}
        new1 = [palette[s] for s in sig1]
        new2 = [palette[s] for s in sig2]
        if len(palette) == len(set(colors1) | set(colors2)):
            return new1, new2
        colors1, colors2 = new1, new2


def _is_isomorphism(first: Structure, second: Structure, mapping: dict[int, int]) -> bool:
    for name in _relation_names(first, second):
        image = {tuple(mapping[x] for x in tup) for tup in first.tuples(name)}
        if second.is_symmetric(name):
            image = {tuple(sorted(t)) for t in image}
        if image != set(second.tuples(name)):
            return False
    return True


def find_isomorphism(
    first: Structure,
    second: Structure,
    *,
    colors1: Sequence[Hashable] | None = None,
    colors2: Sequence[Hashable] | None = None,
    budget_nodes: int | None = None,
) -> dict[int, int] | None:
    """Search for a relation-preserving bijection.

    Annotations are ignored; unary relations act as colors. Optional extra
    colors must be matched as well.

    Args:
        first: Source structure
        second: Target structure
        colors1: Extra per-element colors of first
        colors2: Extra per-element colors of second
        budget_nodes: Cap on individualization steps

    Returns:
        Mapping from first's ids to second's ids, or None

    Raises:
        BudgetExceededError: If the node budget runs out
    """
    if first.size != second.size:
        return None
    for name in _relation_names(first, second):
        if len(first.tuples(name)) != len(second.tuples(name)):
            return None
    if first.size == 0:
        return {}

    budget = Budget(budget_nodes, label="isomorphism")
    start1, start2 = _initial_colors(first, second, colors1, colors2)
    return _search(first, second, start1, start2, budget)


def _search(
    first: Structure, second: Structure, colors1: Coloring, colors2: Coloring, budget: Budget
) -> dict[int, int] | None:
    budget.tick()
    colors1, colors2 = refine(first, second, colors1, colors2)
    if Counter(colors1) != Counter(colors2):
        return None

    cells: dict[int, list[int]] = {}
    for x, c in enumerate(colors1):
        cells.setdefault(c, []).append(x)
    open_cells = [(len(members), c) for c, members in cells.items() if len(members) > 1]
    if not open_cells:
        targets = {c: y for y, c in enumerate(colors2)}
        mapping = {x: targets[c] for x, c in enumerate(colors1)}
        return mapping if _is_isomorphism(first, second, mapping) else None

    _, cell = min(open_cells)
    pivot = cells[cell][0]
    fresh = max(max(colors1), max(colors2)) + 1
    for candidate in (y for y, c in enumerate(colors2) if c == cell):
        branch1 = list(colors1)
        branch2 = list(colors2)
        branch1[pivot] = fresh
        branch2[candidate] = fresh
        found = _search(first, second, branch1, branch2, budget)
        if found is not None:
            return found
    return None


def are_isomorphic(first: Structure, second: Structure, *, budget_nodes: int | None = None) -> bool:
    """Whether the two structures are isomorphic (annotations ignored)."""
    return find_isomorphism(first, second, budget_nodes=budget_nodes) is not None
