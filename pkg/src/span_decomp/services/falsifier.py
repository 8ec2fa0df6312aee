"""Checks on decompositions for the counting properties a refutation
relies on.

Every routine reports a deviation as data (a finding or a failed flag)
rather than raising, except on malformed input.
"""

from __future__ import annotations

from collections import defaultdict
from typing import TYPE_CHECKING

import networkx as nx

from span_decomp.exceptions import (
    AnnotationError,
    BudgetExceededError,
    DomainError,
    ImpossibleCensusError,
    PreconditionError,
)
from span_decomp.logging_config import get_logger
from span_decomp.models.reports import (
    ComponentCount,
    Finding,
    InodeCensus,
    LargeComponent,
    Lemma1Report,
    OverlapPair,
    OverlapProfile,
    PairResult,
    RefuteReport,
    SearchConfig,
    TrimResult,
    WalkTrace,
)
from span_decomp.models.structure import Role
from span_decomp.services.decompositions import (
    bag_elements,
    decomposition_structure,
    placement,
    span,
)
from span_decomp.services.ef_engine import ef_equivalent
from span_decomp.services.enumeration import enumerate_decompositions
from span_decomp.utils import log_operation

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable, Sequence

    from span_decomp.models.decomposition import TreeDecomposition
    from span_decomp.models.structure import Structure

logger = get_logger(__name__)

JUNCTION_ROLES = (Role.SOURCE_S, Role.SOURCE_T)


# ----------------------------------------------------------------------
# Bag-level checks


def check_supp(decomposition: TreeDecomposition, structure: Structure, n: int, n1: int, n2: int) -> bool:
    """Whether some bag holds an n1-run member next to an n2-run member.

    With n1 == n2 the bag must hold two distinct members of n1-runs.

    Raises:
        DomainError: If a run value lies outside [0, n]
        AnnotationError: If the structure carries no run annotations
    """
    for v in (n1, n2):
        if not 0 <= v <= n:
            msg = f"run value {v} must lie in [0, {n}]"
            raise DomainError(msg)
    values = {
        x: ann.run_value
        for x, ann in structure.annotations.items()
        if ann.role is Role.RUN_MEMBER and ann.run_value is not None
    }
    if not values:
        msg = "structure has no run-member annotations"
        raise AnnotationError(msg)

    per_node = bag_elements(placement(decomposition, structure))
    for t in sorted(per_node):
        held = [values[x] for x in per_node[t] if x in values]
        if n1 == n2:
            if held.count(n1) >= 2:  # noqa: PLR2004
                return True
        elif n1 in held and n2 in held:
            return True
    return False


@log_operation("Distance transfer check")
def check_lemma1(structure: Structure, decomposition: TreeDecomposition, delta: int) -> Lemma1Report:
    """Every bag holding x lies within delta * (dist(x, y) + 1) of every bag holding y.

    Pairs in different components are skipped. The first violation in
    element order is reported.

    Raises:
        PreconditionError: If the decomposition's span exceeds delta
    """
    if span(decomposition) > delta:
        msg = f"decomposition span exceeds {delta}"
        raise PreconditionError(msg)
    placed = placement(decomposition, structure)
    for x in sorted(placed):
        farthest: dict[int, int] = {}
        for u in placed[x]:
            for v, d in decomposition.distances_from(u).items():
                farthest[v] = max(d, farthest.get(v, 0))
        for y, d in sorted(nx.single_source_shortest_path_length(structure.gaifman, x).items()):
            if y <= x:
                continue
            bound = delta * (d + 1)
            far = max(farthest[v] for v in placed[y])
            if far > bound:
                return Lemma1Report(ok=False, x=x, y=y, distance=d, bag_distance=far, bound=bound)
    return Lemma1Report(ok=True)


def _junctions(structure: Structure) -> dict[int, list[tuple[int, int]]]:
    by_block: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for x, ann in structure.annotations.items():
        if ann.role in JUNCTION_ROLES and ann.block is not None and ann.index is not None:
            by_block[ann.block].append((ann.index, x))
    return {b: sorted(v) for b, v in by_block.items()}


def overlap_profile(
    decomposition: TreeDecomposition,
    structure: Structure,
    delta: int,
    beta: int,
) -> OverlapProfile:
    """Least bag distance of each pair of consecutive junctions in a block.

    Pairs farther apart than 2 * delta * (2^beta + 1) are flagged.

    Raises:
        AnnotationError: If the structure has no block junctions
    """
    blocks = _junctions(structure)
    if not blocks:
        msg = "structure has no annotated junctions"
        raise AnnotationError(msg)
    threshold = 2 * delta * (2**beta + 1)
    placed = placement(decomposition, structure)
    pairs: list[OverlapPair] = []
    for block in sorted(blocks):
        chain = blocks[block]
        for (index, left), (_, right) in zip(chain, chain[1:], strict=False):
            nearest = decomposition.distances_to_set(placed[left])
            closest = min(nearest[v] for v in placed[right])
            pairs.append(
                OverlapPair(
                    block=block,
                    index=index,
                    left=left,
                    right=right,
                    min_distance=closest,
                    flagged=closest > threshold,
                )
            )
    return OverlapProfile(threshold=threshold, pairs=pairs)


# ----------------------------------------------------------------------
# Subtree surgery


def _holders(decomposition: TreeDecomposition, structure: Structure | None) -> dict[int, frozenset[int]]:
    if structure is not None:
        return placement(decomposition, structure)
    found: dict[int, set[int]] = defaultdict(set)
    for t, bag in decomposition.bags.items():
        if bag.origins is None:
            msg = "bags carry no provenance; pass the decomposed structure"
            raise PreconditionError(msg)
        for x in bag.origins:
            found[x].add(t)
    return {x: frozenset(v) for x, v in found.items()}


def minimal_connecting_subtree(
    decomposition: TreeDecomposition,
    marked: Iterable[int],
    *,
    structure: Structure | None = None,
) -> frozenset[int]:
    """Smallest subtree meeting every bag that holds a marked element.

    Raises:
        PreconditionError: If nothing is marked
        DomainError: If a marked element occurs in no bag
    """
    marked = sorted(set(marked))
    if not marked:
        msg = "at least one element must be marked"
        raise PreconditionError(msg)
    holders = _holders(decomposition, structure)
    terminals: set[int] = set()
    for x in marked:
        if x not in holders:
            msg = f"marked element {x} occurs in no bag"
            raise DomainError(msg)
        terminals |= holders[x]

    tree = nx.Graph(decomposition.tree)
    leaves = [t for t in tree if tree.degree[t] <= 1 and t not in terminals]
    while leaves:
        t = leaves.pop()
        if t not in tree or tree.degree[t] > 1 or t in terminals:
            continue
        around = list(tree.adj[t])
        tree.remove_node(t)
        leaves.extend(around)
    return frozenset(tree)


def _components_without(
    decomposition: TreeDecomposition,
    subtree: frozenset[int],
    t: int,
) -> list[tuple[int, frozenset[int]]]:
    """Components of subtree minus t, keyed by their node adjacent to t."""
    graph = decomposition.tree.subgraph(subtree - {t})
    parts: list[tuple[int, frozenset[int]]] = []
    for component in nx.connected_components(graph):
        touching = sorted(u for u in decomposition.tree.adj[t] if u in component)
        parts.append((touching[0], frozenset(component)))
    return sorted(parts)


def _marks_per_node(
    decomposition: TreeDecomposition,
    marked: Iterable[int],
    structure: Structure | None,
) -> dict[int, set[int]]:
    holders = _holders(decomposition, structure)
    return bag_elements({x: holders.get(x, frozenset()) for x in set(marked)})


@log_operation("Trim subtree")
def trim_to_bounded_degree(
    subtree: Iterable[int],
    decomposition: TreeDecomposition,
    structure: Structure | None,
    marked: Iterable[int],
    k: int,
) -> TrimResult:
    """Cut hanging components until no node has degree above 2k + 3.

    At the least node of excessive degree every component of the subtree
    minus that node is dropped unless it holds a marked element missing
    from the node's bag. A node that cannot be brought down, or a mark
    lost from the subtree, is reported as a finding.
    """
    marked = set(marked)
    nodes = frozenset(subtree)
    per_node = _marks_per_node(decomposition, marked, structure)
    covered_before = {x for t in nodes for x in per_node.get(t, ())}
    limit = 2 * k + 3
    stuck: set[int] = set()
    findings: list[Finding] = []

    while True:
        graph = decomposition.tree.subgraph(nodes)
        heavy = sorted(t for t in graph if graph.degree[t] > limit and t not in stuck)
        if not heavy:
            break
        t = heavy[0]
        here = per_node.get(t, set())
        dropped: set[int] = set()
        for _, component in _components_without(decomposition, nodes, t):
            held = {x for u in component for x in per_node.get(u, ())}
            if not held - here:
                dropped |= component
        nodes -= dropped
        remaining = decomposition.tree.subgraph(nodes).degree[t]
        if remaining > limit:
            stuck.add(t)
            findings.append(
                Finding(kind="degree", node=t, detail=f"degree {remaining} stays above {limit}")
            )

    covered_after = {x for t in nodes for x in per_node.get(t, ())}
    findings.extend(
        Finding(kind="lost-mark", detail=f"marked element {x} no longer covered")
        for x in sorted(covered_before - covered_after)
    )
    return TrimResult(nodes=nodes, findings=findings)


# ----------------------------------------------------------------------
# Census and walk


def inode_census(
    subtree: Iterable[int],
    decomposition: TreeDecomposition,
    t: int,
    marked: Iterable[int],
    *,
    structure: Structure | None = None,
) -> InodeCensus:
    """Marks held exclusively by each component of the subtree minus t.

    Raises:
        DomainError: If t is not in the subtree
    """
    nodes = frozenset(subtree)
    if t not in nodes:
        msg = f"node {t} is not in the subtree"
        raise DomainError(msg)
    per_node = _marks_per_node(decomposition, marked, structure)
    here = per_node.get(t, set())
    parts = _components_without(decomposition, nodes, t)
    held = [{x for u in comp for x in per_node.get(u, ())} - here for _, comp in parts]
    components = []
    for i, (neighbor, comp) in enumerate(parts):
        elsewhere = set().union(*(h for j, h in enumerate(held) if j != i))
        components.append(
            ComponentCount(neighbor=neighbor, nodes=comp, exclusive=sorted(held[i] - elsewhere))
        )
    return InodeCensus(node=t, components=components, in_bag=sorted(here))


def large_component(counts: Sequence[int] | InodeCensus, n_bound: int, total: int, k: int) -> LargeComponent:
    """The component holding more than total - (k + 1) - N marks.

    Components whose count falls in [N, total - (k + 1) - N] are reported
    as findings.

    Raises:
        ImpossibleCensusError: If two components exceed the threshold
    """
    values = counts.counts if isinstance(counts, InodeCensus) else list(counts)
    threshold = total - (k + 1) - n_bound
    above = [i for i, c in enumerate(values) if c > threshold]
    if len(above) > 1:
        msg = f"components {above} all exceed threshold {threshold}"
        raise ImpossibleCensusError(msg)
    findings = [
        Finding(kind="forbidden-band", detail=f"component {i} holds {c} marks")
        for i, c in enumerate(values)
        if n_bound <= c <= threshold
    ]
    return LargeComponent(component=above[0] if above else None, threshold=threshold, findings=findings)


def walk_large_neighbors(
    start: int,
    large_neighbor: Callable[[int], int | None],
    max_steps: int,
) -> WalkTrace:
    """Follow large-neighbour pointers until a node is revisited two steps later."""
    steps = [start]
    findings: list[Finding] = []
    while len(steps) <= max_steps:
        nxt = large_neighbor(steps[-1])
        if nxt is None:
            findings.append(Finding(kind="halt", node=steps[-1], detail="no large component"))
            return WalkTrace(steps=steps, findings=findings)
        steps.append(nxt)
        if len(steps) >= 3 and steps[-1] == steps[-3]:  # noqa: PLR2004
            return WalkTrace(steps=steps, backtrack_at=len(steps) - 1, findings=findings)
    findings.append(Finding(kind="budget", node=steps[-1], detail=f"no backtrack within {max_steps} steps"))
    return WalkTrace(steps=steps, findings=findings)


@log_operation("Large-component walk")
def algorithm1_walk(
    subtree: Iterable[int],
    decomposition: TreeDecomposition,
    structure: Structure | None,
    marked: Iterable[int],
    n_bound: int,
    k: int,
    max_steps: int,
) -> WalkTrace:
    """Walk from the least subtree node towards its large component.

    Impossible censuses end the walk with a finding; forbidden-band
    findings of every visited node are collected.
    """
    nodes = frozenset(subtree)
    if not nodes:
        msg = "subtree is empty"
        raise PreconditionError(msg)
    marked = sorted(set(marked))
    band: list[Finding] = []

    def step(t: int) -> int | None:
        census = inode_census(nodes, decomposition, t, marked, structure=structure)
        verdict = large_component(census, n_bound, len(marked), k)
        band.extend(f.model_copy(update={"node": t}) for f in verdict.findings)
        if verdict.component is None:
            return None
        return census.components[verdict.component].neighbor

    try:
        trace = walk_large_neighbors(min(nodes), step, max_steps)
    except ImpossibleCensusError as exc:
        return WalkTrace(steps=[min(nodes)], findings=[*band, Finding(kind="impossible-census", detail=str(exc))])
    return trace.model_copy(update={"findings": [*band, *trace.findings]})


def bridge_count(census: InodeCensus, adjacent: Iterable[tuple[int, int]], component: int) -> int:
    """Adjacent pairs joining a mark exclusive to one component with a mark exclusive to another."""
    inside = set(census.components[component].exclusive)
    outside = {x for i, c in enumerate(census.components) if i != component for x in c.exclusive}
    pairs = {(min(a, b), max(a, b)) for a, b in adjacent}
    return sum(1 for a, b in pairs if (a in inside and b in outside) or (b in inside and a in outside))


# ----------------------------------------------------------------------
# Exhaustive refutation


def _equivalence_classes(views: Sequence[Structure], alpha: int, budget_nodes: int | None) -> list[int | None]:
    """Class index per view, None where a game against a representative ran out of budget.

    Representatives are pairwise distinguishable, so two classified views
    are equivalent iff their classes agree.
    """
    representatives: list[Structure] = []
    classes: list[int | None] = []
    for view in views:
        undecided = False
        for index, representative in enumerate(representatives):
            try:
                if ef_equivalent(view, representative, alpha, budget_nodes=budget_nodes):
                    classes.append(index)
                    break
            except BudgetExceededError:
                undecided = True
        else:
            if undecided:
                classes.append(None)
            else:
                classes.append(len(representatives))
                representatives.append(view)
    return classes


@log_operation("Micro refutation")
def micro_refute(
    first: Structure,
    second: Structure,
    config: SearchConfig,
    alpha: int,
    *,
    seed: int | None = None,
    ef_budget_nodes: int | None = None,
) -> RefuteReport:
    """Compare every decomposition of one structure with every one of the other.

    A pair is similar when the decomposition structures are equivalent in
    the game with alpha rounds; pairs whose game runs out of budget are
    listed as inconclusive.

    Views are first sorted into equivalence classes against one
    representative each; only views whose class stays undecided within
    the budget are compared pair by pair.
    """
    found_g = enumerate_decompositions(first, config)
    found_h = enumerate_decompositions(second, config)
    views_g = [decomposition_structure(td) for td in found_g.decompositions]
    views_h = [decomposition_structure(td) for td in found_h.decompositions]
    classes = _equivalence_classes([*views_g, *views_h], alpha, ef_budget_nodes)
    class_g, class_h = classes[: len(views_g)], classes[len(views_g) :]
    similar: list[PairResult] = []
    inconclusive: list[PairResult] = []
    for i, view_g in enumerate(views_g):
        for j, view_h in enumerate(views_h):
            left, right = class_g[i], class_h[j]
            if left is not None and right is not None:
                if left == right:
                    similar.append(PairResult(g_index=i, h_index=j, similar=True))
                continue
            try:
                if ef_equivalent(view_g, view_h, alpha, budget_nodes=ef_budget_nodes):
                    similar.append(PairResult(g_index=i, h_index=j, similar=True))
            except BudgetExceededError:
                inconclusive.append(PairResult(g_index=i, h_index=j))
    logger.info(
        "Refutation search finished",
        extra={
            "g_decompositions": len(views_g),
            "h_decompositions": len(views_h),
            "similar": len(similar),
            "inconclusive": len(inconclusive),
        },
    )
    return RefuteReport(
        alpha=alpha,
        k=config.k,
        delta=config.delta,
        seed=seed,
        g_forms=found_g.canonical_forms,
        h_forms=found_h.canonical_forms,
        g_complete=found_g.complete,
        h_complete=found_h.complete,
        pairs_checked=len(views_g) * len(views_h),
        similar_pairs=similar,
        inconclusive_pairs=inconclusive,
    )
