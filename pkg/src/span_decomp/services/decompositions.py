"""Validity, reconstruction and measures of k-bag tree-decompositions."""

from __future__ import annotations

from collections import defaultdict
from typing import TYPE_CHECKING

import networkx as nx
from networkx.utils import UnionFind

from span_decomp.exceptions import (
    DomainError,
    MergeConflictError,
    PreconditionError,
    WidthError,
)
from span_decomp.models.decomposition import (
    ClassicalDecomposition,
    Condition,
    KBag,
    Occurrences,
    QuotientMap,
    TreeDecomposition,
    Violation,
)
from span_decomp.models.structure import (
    COLORS,
    RelationSymbol,
    Structure,
    Vocabulary,
)
from span_decomp.services.isomorphism import find_isomorphism
from span_decomp.services.structures import induced_substructure
from span_decomp.utils import log_operation

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping


def validate_td(decomposition: TreeDecomposition) -> list[Violation]:
    """Check the validity conditions of a decomposition.

    Reports every failure of: rooted-tree shape, bag size at most k + 1,
    mark indices at most k, interface matching (an out-mark at i iff some
    child carries an in-mark at i) and a root without in-marks.

    Returns:
        All violations; empty means valid
    """
    td = decomposition
    violations: list[Violation] = []

    for t, up in sorted(td.parent.items()):
        if up is not None and up not in td.parent:
            violations.append(
                Violation(node=t, condition=Condition.TREE_SHAPE, detail=f"parent {up} does not exist")
            )
    if len(td.roots) != 1:
        violations.append(
            Violation(condition=Condition.TREE_SHAPE, detail=f"expected one root, found {len(td.roots)}")
        )
    elif not nx.is_tree(td.tree):
        violations.append(Violation(condition=Condition.TREE_SHAPE, detail="parent relation has a cycle"))

    for t in td.nodes:
        bag = td.bags[t]
        if bag.size > td.k + 1:
            violations.append(
                Violation(node=t, condition=Condition.BAG_SIZE, detail=f"{bag.size} elements exceed k + 1 = {td.k + 1}")
            )
        for i in sorted(set(bag.in_marks) | set(bag.out_marks)):
            if i > td.k:
                violations.append(Violation(node=t, condition=Condition.MARK_INDEX, index=i))
        child_in = {i for u in td.children[t] for i in td.bags[u].in_marks}
        for i in sorted(set(bag.out_marks) ^ child_in):
            detail = "out-mark without child in-mark" if i in bag.out_marks else "child in-mark without out-mark"
            violations.append(Violation(node=t, condition=Condition.INTERFACE, index=i, detail=detail))

    for t in td.roots:
        violations.extend(
            Violation(node=t, condition=Condition.ROOT_IN_MARK, index=i) for i in sorted(td.bags[t].in_marks)
        )
    return violations


def is_valid(decomposition: TreeDecomposition) -> bool:
    """Whether validate_td reports nothing."""
    return not validate_td(decomposition)


def _require_valid(decomposition: TreeDecomposition) -> None:
    violations = validate_td(decomposition)
    if violations:
        first = violations[0]
        msg = f"invalid decomposition: {first.condition} at node {first.node} ({len(violations)} violations)"
        raise PreconditionError(msg)


def quotient(decomposition: TreeDecomposition) -> QuotientMap:
    """Equivalence generated by the interface relation.

    A parent's out-mark at i is linked to every child's in-mark at i.
    Classes are numbered by their least (node, local) member.

    Raises:
        PreconditionError: If the decomposition is invalid
    """
    _require_valid(decomposition)
    td = decomposition
    pairs = [(t, x) for t in td.nodes for x in td.bags[t].content.elements]
    classes = UnionFind(pairs)
    for t in td.nodes:
        up = td.parent[t]
        if up is None:
            continue
        above = td.bags[up].out_marks
        for i, x in td.bags[t].in_marks.items():
            classes.union((up, above[i]), (t, x))

    first_member: dict[tuple[int, int], tuple[int, int]] = {}
    for pair in pairs:
        root = classes[pair]
        first_member.setdefault(root, pair)
    numbering = {root: n for n, root in enumerate(sorted(first_member, key=first_member.__getitem__))}
    return QuotientMap(classes={pair: numbering[classes[pair]] for pair in pairs})


@log_operation("Reconstruct structure")
def ext(decomposition: TreeDecomposition) -> tuple[Structure, QuotientMap]:
    """Rebuild the decomposed structure as a quotient of the bag union.

    A tuple of classes holds iff one bag holds a tuple of representatives.

    Raises:
        PreconditionError: If the decomposition is invalid
        MergeConflictError: If one class receives both P0 and P1
    """
    qmap = quotient(decomposition)
    td = decomposition
    vocabulary = Vocabulary()
    relations: dict[str, set[tuple[int, ...]]] = defaultdict(set)
    for t in td.nodes:
        content = td.bags[t].content
        vocabulary = vocabulary.union(content.vocabulary)
        for name, tuples in content.relations.items():
            for tup in tuples:
                relations[name].add(tuple(qmap.classes[(t, x)] for x in tup))

    if all(c in relations for c in COLORS):
        for (cls,) in sorted(relations["P0"] & relations["P1"]):
            msg = f"class {cls} merges P0 and P1 elements"
            raise MergeConflictError(msg, class_id=cls, colors=frozenset(COLORS))

    structure = Structure(
        vocabulary=vocabulary,
        size=qmap.class_count,
        relations={name: frozenset(tuples) for name, tuples in relations.items()},
        symmetric_edges=all(td.bags[t].content.symmetric_edges for t in td.nodes),
    )
    return structure, qmap


def _subtree_diameter(decomposition: TreeDecomposition, nodes: frozenset[int]) -> int:
    """Largest tree distance inside a node set, by two farthest-node sweeps."""
    if len(nodes) < 2:  # noqa: PLR2004
        return 0
    sub = decomposition.tree.subgraph(nodes)
    graph = sub if nx.is_connected(sub) else decomposition.tree

    def farthest(start: int) -> tuple[int, int]:
        lengths = nx.single_source_shortest_path_length(graph, start)
        return max((lengths[t], t) for t in nodes if t in lengths)

    _, end = farthest(min(nodes))
    diameter, _ = farthest(end)
    return diameter


def element_occurrences(
    decomposition: TreeDecomposition, class_id: int, qmap: QuotientMap | None = None
) -> Occurrences:
    """Occurrence nodes of one class and their diameter in the tree.

    Raises:
        DomainError: If the class does not exist
    """
    qmap = qmap or quotient(decomposition)
    if class_id not in qmap.occurrences:
        msg = f"unknown class {class_id}"
        raise DomainError(msg)
    nodes = qmap.occurrences[class_id]
    return Occurrences(nodes=nodes, diameter=_subtree_diameter(decomposition, nodes))


def span(decomposition: TreeDecomposition, qmap: QuotientMap | None = None) -> int:
    """Largest tree distance between two bags holding one class."""
    qmap = qmap or quotient(decomposition)
    return max(
        (_subtree_diameter(decomposition, nodes) for nodes in qmap.occurrences.values()),
        default=0,
    )


def width(decomposition: TreeDecomposition) -> int:
    """Largest bag size minus one."""
    return max(bag.size for bag in decomposition.bags.values()) - 1


def is_path_decomposition(decomposition: TreeDecomposition) -> bool:
    """Whether no node has two children."""
    return all(len(kids) <= 1 for kids in decomposition.children.values())


def tree_distance(decomposition: TreeDecomposition, t: int, u: int) -> int:
    """Path length between two nodes in the undirected tree.

    Raises:
        DomainError: If a node is unknown or the nodes are disconnected
    """
    for node in (t, u):
        if node not in decomposition.parent:
            msg = f"unknown node {node}"
            raise DomainError(msg)
    try:
        return nx.shortest_path_length(decomposition.tree, t, u)
    except nx.NetworkXNoPath as e:
        msg = f"nodes {t} and {u} are not connected"
        raise DomainError(msg) from e


# ----------------------------------------------------------------------
# Classical decompositions


def classical_violations(structure: Structure, decomposition: ClassicalDecomposition) -> list[str]:
    """Failures of the classical conditions, as readable messages."""
    problems: list[str] = []
    parent = decomposition.parent
    roots = [t for t, up in parent.items() if up is None]
    tree = nx.Graph()
    tree.add_nodes_from(parent)
    for t, up in parent.items():
        if up is not None:
            if up not in parent:
                problems.append(f"node {t} has unknown parent {up}")
            else:
                tree.add_edge(t, up)
    if len(roots) != 1 or not nx.is_tree(tree):
        problems.append("bags do not form a rooted tree")
        return problems

    occurrences: dict[int, set[int]] = defaultdict(set)
    for t, bag in decomposition.bags.items():
        if not bag:
            problems.append(f"bag {t} is empty")
        for x in bag:
            if not 0 <= x < structure.size:
                problems.append(f"bag {t} holds unknown element {x}")
            occurrences[x].add(t)
    problems.extend(f"element {x} appears in no bag" for x in structure.elements if x not in occurrences)
    for name in sorted(structure.relations):
        for tup in sorted(structure.tuples(name)):
            if not set.intersection(*(occurrences.get(x, set()) for x in tup)):
                problems.append(f"tuple {name}{tup} is covered by no bag")
    for x in sorted(occurrences):
        if not nx.is_connected(tree.subgraph(occurrences[x])):
            problems.append(f"bags holding element {x} are not connected")
    return problems


@log_operation("Encode classical decomposition")
def encode_classical(
    structure: Structure, decomposition: ClassicalDecomposition, k: int | None = None
) -> TreeDecomposition:
    """Turn a bag-subset decomposition into a k-bag decomposition.

    Each bag holds the induced substructure on its elements in ascending
    order. Elements shared with a child get out-mark indices 0, 1, ... in
    ascending element order; a child's in-mark reuses its parent's index.

    Args:
        structure: Decomposed structure
        decomposition: Classical decomposition of it
        k: Width budget, the decomposition's width when omitted

    Raises:
        PreconditionError: If a classical condition fails
        WidthError: If a bag has more than k + 1 elements
    """
    problems = classical_violations(structure, decomposition)
    if problems:
        msg = "; ".join(problems[:5])
        raise PreconditionError(msg)
    k = decomposition.width if k is None else k
    if decomposition.width > k:
        msg = f"bag of size {decomposition.width + 1} exceeds k + 1 = {k + 1}"
        raise WidthError(msg)

    children: dict[int, list[int]] = defaultdict(list)
    for t, up in decomposition.parent.items():
        if up is not None:
            children[up].append(t)

    out_index: dict[int, dict[int, int]] = {}
    for t, bag in decomposition.bags.items():
        shared = sorted(x for x in bag if any(x in decomposition.bags[u] for u in children[t]))
        out_index[t] = {x: i for i, x in enumerate(shared)}

    bags: dict[int, KBag] = {}
    for t, bag in decomposition.bags.items():
        content, origin = induced_substructure(structure, bag)
        local = {x: i for i, x in enumerate(origin)}
        up = decomposition.parent[t]
        in_marks = (
            {out_index[up][x]: local[x] for x in origin if x in decomposition.bags[up]} if up is not None else {}
        )
        bags[t] = KBag(
            content=content.model_copy(update={"annotations": {}}),
            in_marks=in_marks,
            out_marks={i: local[x] for x, i in out_index[t].items()},
            origins=tuple(origin),
        )
    return TreeDecomposition(k=k, parent=dict(decomposition.parent), bags=bags)


# ----------------------------------------------------------------------
# Views


CHILD_RELATION = "CHILD"


def class_predicate(decomposition: TreeDecomposition, node: int) -> str:
    """Unary predicate naming the bag class at a node."""
    return f"C_{decomposition.bags[node].bag_class.digest}"


def decomposition_structure(decomposition: TreeDecomposition) -> Structure:
    """The decomposition as a structure over tree nodes.

    Nodes are renumbered in ascending order; each carries the unary
    predicate of its bag class and CHILD links a parent to each child.
    """
    td = decomposition
    ids = {t: i for i, t in enumerate(td.nodes)}
    labels: dict[str, set[tuple[int, ...]]] = defaultdict(set)
    for t in td.nodes:
        labels[class_predicate(td, t)].add((ids[t],))
    vocabulary = Vocabulary(
        relations=(
            RelationSymbol(name=CHILD_RELATION, arity=2),
            *(RelationSymbol(name=name, arity=1) for name in sorted(labels)),
        )
    )
    edges = frozenset((ids[up], ids[t]) for t, up in td.parent.items() if up is not None)
    relations: dict[str, frozenset[tuple[int, ...]]] = {name: frozenset(v) for name, v in labels.items()}
    if edges:
        relations[CHILD_RELATION] = edges
    return Structure(vocabulary=vocabulary, size=len(ids), relations=relations, symmetric_edges=False)


def placement(
    decomposition: TreeDecomposition,
    structure: Structure,
    *,
    budget_nodes: int | None = None,
) -> dict[int, frozenset[int]]:
    """Nodes whose bag holds each element of the decomposed structure.

    Bag provenance is used when every bag records it; otherwise an
    isomorphism between ext and the structure is searched.

    Raises:
        PreconditionError: If the decomposition does not decompose the structure
    """
    td = decomposition
    found: dict[int, set[int]] = defaultdict(set)
    if all(bag.origins is not None for bag in td.bags.values()):
        for t in td.nodes:
            for x in td.bags[t].origins or ():
                found[x].add(t)
        if set(found) == set(structure.elements):
            return {x: frozenset(found[x]) for x in structure.elements}

    rebuilt, qmap = ext(td)
    witness = find_isomorphism(rebuilt, structure, budget_nodes=budget_nodes)
    if witness is None:
        msg = "decomposition does not reconstruct the given structure"
        raise PreconditionError(msg)
    return {witness[cls]: nodes for cls, nodes in qmap.occurrences.items()}


def bag_elements(placed: Mapping[int, Iterable[int]]) -> dict[int, set[int]]:
    """Invert a placement: structure elements per node."""
    per_node: dict[int, set[int]] = defaultdict(set)
    for x, nodes in placed.items():
        for t in nodes:
            per_node[t].add(x)
    return per_node
