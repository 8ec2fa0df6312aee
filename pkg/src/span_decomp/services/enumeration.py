"""Exhaustive enumeration of small span-bounded decompositions.

Shapes are grown in breadth-first order: node i attaches to a parent whose
index never decreases, so every node before the current parent is closed.
A new bag keeps any part of its parent's bag and may add unseen elements,
so repeated and nested bags are reached up to ``max_tree_nodes``. Every
shape that covers the structure is then labelled in all ways: each node
picks injective out-mark indices for the elements it shares with its
children, and each fact goes to a non-empty set of bags that contain it.
Output is deduplicated by the canonical form of the labelled rooted tree.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import chain, combinations, permutations, product
from math import comb
from typing import TYPE_CHECKING

from span_decomp.exceptions import BudgetExceededError
from span_decomp.logging_config import get_logger
from span_decomp.models.decomposition import KBag, TreeDecomposition
from span_decomp.models.reports import SearchConfig, SearchOutcome
from span_decomp.models.structure import Structure
from span_decomp.utils import Budget, log_operation

if TYPE_CHECKING:
    from collections.abc import Callable, Iterator, Sequence

logger = get_logger(__name__)

Bag = tuple[int, ...]
Fact = tuple[str, tuple[int, ...]]


def _bag_key(bag: Bag) -> tuple[int, Bag]:
    return (len(bag), bag)


def _tree_form(root: int, children: Callable[[int], Sequence[int]], label: Callable[[int], str]) -> str:
    def encode(t: int) -> str:
        below = sorted(encode(c) for c in children(t))
        return "(" + label(t) + "".join(below) + ")"

    return encode(root)


def canonical_form(decomposition: TreeDecomposition) -> str:
    """Canonical string of the rooted tree labelled by bag classes."""
    td = decomposition
    return _tree_form(td.root, lambda t: td.children[t], lambda t: td.bags[t].bag_class.digest)


def _non_empty_subsets(nodes: Sequence[int]) -> list[tuple[int, ...]]:
    return list(chain.from_iterable(combinations(nodes, r) for r in range(1, len(nodes) + 1)))


@dataclass
class _Partition:
    """Search below one fixed root bag."""

    structure: Structure
    config: SearchConfig
    root: Bag
    budget: Budget
    found: dict[str, TreeDecomposition] = field(default_factory=dict)
    complete: bool = True

    def __post_init__(self) -> None:
        self.facts: list[Fact] = sorted(
            (name, tup) for name in self.structure.relations for tup in self.structure.tuples(name)
        )
        self.tuples: list[frozenset[int]] = sorted(
            {frozenset(tup) for _, tup in self.facts if len(set(tup)) > 1},
            key=lambda s: sorted(s),
        )
        self.bags: list[Bag] = []
        self.parent: list[int | None] = []
        self.dist: list[list[int]] = []
        self.occ: dict[int, list[int]] = {}
        self._kbags: dict[tuple[object, ...], KBag] = {}

    # state --------------------------------------------------------------

    def _push(self, bag: Bag, up: int | None) -> None:
        index = len(self.bags)
        row = [0] * index if up is None else [self.dist[up][u] + 1 for u in range(index)]
        for u, r in enumerate(self.dist):
            r.append(row[u])
        self.dist.append([*row, 0])
        self.bags.append(bag)
        self.parent.append(up)
        for x in bag:
            self.occ.setdefault(x, []).append(index)

    def _pop(self) -> None:
        bag = self.bags.pop()
        self.parent.pop()
        self.dist.pop()
        for r in self.dist:
            r.pop()
        for x in bag:
            self.occ[x].pop()
            if not self.occ[x]:
                del self.occ[x]

    def _uncovered(self) -> list[frozenset[int]]:
        sets = [frozenset(b) for b in self.bags]
        return [tup for tup in self.tuples if not any(tup <= b for b in sets)]

    def _feasible(self, first_open: int) -> bool:
        """Enough room is left and every uncovered tuple is still reachable."""
        remaining = self.config.max_tree_nodes - len(self.bags)
        cap = self.config.k + 1
        if self.structure.size - len(self.occ) > remaining * cap:
            return False
        uncovered = self._uncovered()
        for size, count in Counter(len(tup) for tup in uncovered).items():
            if count > remaining * comb(cap, size):
                return False
        open_elements = {x for b in self.bags[first_open:] for x in b}
        return not any(x in self.occ and x not in open_elements for tup in uncovered for x in tup)

    # labelling ----------------------------------------------------------

    def _kbag(self, t: int, facts: frozenset[int], in_marks: dict[int, int], out_marks: dict[int, int]) -> KBag:
        bag = self.bags[t]
        key = (bag, facts, tuple(sorted(in_marks.items())), tuple(sorted(out_marks.items())))
        cached = self._kbags.get(key)
        if cached is None:
            local = {x: i for i, x in enumerate(bag)}
            relations: dict[str, set[tuple[int, ...]]] = {}
            for index in sorted(facts):
                name, tup = self.facts[index]
                relations.setdefault(name, set()).add(tuple(local[x] for x in tup))
            content = Structure(
                vocabulary=self.structure.vocabulary,
                size=len(bag),
                relations={name: frozenset(tuples) for name, tuples in relations.items()},
                symmetric_edges=self.structure.symmetric_edges,
            )
            cached = KBag(content=content, in_marks=in_marks, out_marks=out_marks, origins=bag)
            self._kbags[key] = cached
        return cached

    def _labellings(self) -> Iterator[tuple[tuple[dict[int, int], ...], tuple[tuple[int, ...], ...]]]:
        """Every choice of out-mark indices and fact placement for the current shape."""
        nodes = range(len(self.bags))
        sets = [frozenset(b) for b in self.bags]
        shared = [
            [x for x in self.bags[t] if any(x in sets[u] for u in nodes if self.parent[u] == t)] for t in nodes
        ]
        indices = range(self.config.k + 1)
        index_choices = [
            [dict(zip(shared[t], chosen, strict=True)) for chosen in permutations(indices, len(shared[t]))]
            for t in nodes
        ]
        placements = [_non_empty_subsets([t for t in nodes if set(tup) <= sets[t]]) for _, tup in self.facts]
        for marks in product(*index_choices):
            for placed in product(*placements):
                yield marks, placed

    def _emit(self) -> None:
        nodes = range(len(self.bags))
        children = [[u for u in nodes if self.parent[u] == t] for t in nodes]
        for marks, placed in self._labellings():
            self.budget.tick()
            facts_at: list[set[int]] = [set() for _ in nodes]
            for index, where in enumerate(placed):
                for t in where:
                    facts_at[t].add(index)
            kbags: list[KBag] = []
            for t in nodes:
                bag, up = self.bags[t], self.parent[t]
                local = {x: i for i, x in enumerate(bag)}
                in_marks = {} if up is None else {marks[up][x]: local[x] for x in bag if x in marks[up]}
                out_marks = {i: local[x] for x, i in marks[t].items()}
                kbags.append(self._kbag(t, frozenset(facts_at[t]), in_marks, out_marks))
            form = _tree_form(0, lambda t: children[t], lambda t: kbags[t].bag_class.digest)
            if form not in self.found:
                self.found[form] = TreeDecomposition(
                    k=self.config.k,
                    parent=dict(enumerate(self.parent)),
                    bags=dict(enumerate(kbags)),
                )

    # search -------------------------------------------------------------

    def _candidates(self, t: int) -> list[Bag]:
        parent_bag = self.bags[t]
        unseen = [x for x in self.structure.elements if x not in self.occ]
        cap = self.config.k + 1
        out: list[Bag] = []
        for a_size in range(min(len(parent_bag), cap) + 1):
            for kept in combinations(parent_bag, a_size):
                if not self._span_ok(t, kept):
                    continue
                for u_size in range(min(len(unseen), cap - a_size) + 1):
                    if a_size + u_size == 0:
                        continue
                    for fresh in combinations(unseen, u_size):
                        out.append(tuple(sorted(kept + fresh)))
        return sorted(out, key=_bag_key)

    def _span_ok(self, t: int, kept: Bag) -> bool:
        delta = self.config.delta
        return all(self.dist[t][u] + 1 <= delta for x in kept for u in self.occ[x])

    def _extend(self, last_parent: int) -> None:
        self.budget.tick()
        if len(self.occ) == self.structure.size and not self._uncovered():
            self._emit()
        if len(self.bags) >= self.config.max_tree_nodes:
            return
        last = len(self.bags) - 1
        parents = [last] if self.config.path_only else range(last_parent, last + 1)
        for t in parents:
            previous = self.bags[last] if last > 0 and self.parent[last] == t else None
            for bag in self._candidates(t):
                if previous is not None and _bag_key(bag) < _bag_key(previous):
                    continue
                self._push(bag, t)
                if self._feasible(t):
                    self._extend(t)
                self._pop()

    def run(self) -> None:
        self._push(self.root, None)
        try:
            if self._feasible(0):
                self._extend(0)
        except BudgetExceededError as exc:
            self.complete = False
            logger.warning(
                "Partition budget exhausted",
                extra={"root_bag": list(self.root), "nodes": exc.nodes, "seconds": round(exc.seconds, 3)},
            )


def root_bags(structure: Structure, k: int) -> list[Bag]:
    """All non-empty bags of at most k + 1 elements, in search order."""
    return [bag for size in range(1, k + 2) for bag in combinations(structure.elements, size)]


@log_operation("Enumerate decompositions")
def enumerate_decompositions(structure: Structure, config: SearchConfig) -> SearchOutcome:
    """Every decomposition of width <= k and span <= delta, up to isomorphism.

    Trees have at most ``max_tree_nodes`` nodes; within that cap bags may
    repeat or nest, facts may sit in any non-empty set of covering bags and
    interface marks take any injective indices in 0..k. Each root bag is
    its own partition with its own budget, so the outcome does not depend
    on the number of workers.

    Args:
        structure: Structure to decompose
        config: Width, span, shape and budget bounds

    Returns:
        Decompositions sorted by canonical form, with a completeness flag
    """
    partitions = [
        _Partition(
            structure=structure,
            config=config,
            root=root,
            budget=Budget(config.budget_nodes, config.budget_seconds, label="decomposition search"),
        )
        for root in root_bags(structure, config.k)
    ]
    if config.workers > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            list(pool.map(_Partition.run, partitions))
    else:
        for partition in partitions:
            partition.run()

    unique: dict[str, TreeDecomposition] = {}
    for partition in partitions:
        for form, td in partition.found.items():
            unique.setdefault(form, td)
    forms = sorted(unique)
    return SearchOutcome(
        decompositions=[unique[f] for f in forms],
        canonical_forms=forms,
        complete=all(p.complete for p in partitions),
        explored=sum(p.budget.nodes for p in partitions),
    )
