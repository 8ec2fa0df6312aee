"""Deterministic generators for the gadget families.

Every generator assigns ids in creation order and annotates each element
with its role, so that the canonical decompositions can be rebuilt from a
structure alone.
"""

from __future__ import annotations

import itertools
from typing import TYPE_CHECKING

import networkx as nx
from networkx.algorithms.connectivity import local_node_connectivity

from span_decomp.config import get_settings
from span_decomp.exceptions import AnnotationError, DomainError, NodeCapError, PlanError
from span_decomp.logging_config import get_logger
from span_decomp.models.structure import Annotation, Role, Side
from span_decomp.services.planner import bicolit_size
from span_decomp.services.structures import StructureBuilder
from span_decomp.utils import log_operation

if TYPE_CHECKING:
    from span_decomp.models.plans import PwPlan, TwPlan
    from span_decomp.models.structure import Structure

logger = get_logger(__name__)

BIT_COLORS = {"0": "P0", "1": "P1"}


def _check_cap(estimate: int, node_cap: int | None) -> None:
    cap = node_cap if node_cap is not None else get_settings().node_cap
    if estimate > cap:
        msg = f"structure would have {estimate} nodes, above the cap of {cap}"
        raise NodeCapError(msg)


def run_bits(p: int, n: int, value: int) -> str:
    """The coloring pattern (0^(n-value) 1^value)^p."""
    return ("0" * (n - value) + "1" * value) * p


# ----------------------------------------------------------------------
# Gadgets and bicolored chains


def _add_gadget(
    builder: StructureBuilder,
    s: int,
    beta: int,
    p: int,
    n: int,
    values: tuple[int | None, int | None],
    *,
    block: int,
    copy: int,
    t_annotation: Annotation,
) -> int:
    """Add the two paths of one gadget starting at s; return the new t."""
    buffer = 2**beta - 1
    sequences: list[list[int]] = []
    for side, value in zip((Side.TOP, Side.BOTTOM), values, strict=True):
        bits = run_bits(p, n, value) if value is not None else None
        nodes = []
        for pos in range(2 * buffer + p * n):
            in_run = buffer <= pos < buffer + p * n
            ann = Annotation(
                role=Role.RUN_MEMBER if in_run else Role.PLAIN,
                block=block,
                copy_index=copy,
                side=side,
                position=pos,
                run_value=value if in_run else None,
            )
            color = BIT_COLORS[bits[pos - buffer]] if in_run and bits is not None else None
            nodes.append(builder.add_element(color=color, annotation=ann))
        sequences.append(nodes)
    t = builder.add_element(annotation=t_annotation)
    for nodes in sequences:
        chain = [s, *nodes, t]
        for a, b in itertools.pairwise(chain):
            builder.add_edge(a, b)
    return t


def _add_bicolit(
    builder: StructureBuilder,
    beta: int,
    p: int,
    n: int,
    values: tuple[int | None, int | None],
    m: int,
    *,
    block: int,
) -> tuple[int, int]:
    """Add m gadgets sharing endpoints; return the first and last junction."""
    first = builder.add_element(annotation=Annotation(role=Role.SOURCE_S, block=block, index=0))
    current = first
    for j in range(m):
        role = Role.SOURCE_T if j == m - 1 else Role.SOURCE_S
        current = _add_gadget(
            builder,
            current,
            beta,
            p,
            n,
            values,
            block=block,
            copy=j,
            t_annotation=Annotation(role=role, block=block, index=j + 1),
        )
    return first, current


def _check_run_values(n: int, *values: int) -> None:
    for v in values:
        if not 0 <= v <= n:
            msg = f"run value {v} must lie in [0, {n}]"
            raise DomainError(msg)


@log_operation("Make gadget")
def make_gadget(beta: int, p: int, n: int) -> Structure:
    """Two s-t paths, each of 2^beta edges, a run of pn nodes, 2^beta edges."""
    if p < 1 or n < 1 or beta < 0:
        msg = "need p, n >= 1 and beta >= 0"
        raise DomainError(msg)
    builder = StructureBuilder()
    _add_bicolit(builder, beta, p, n, (None, None), 1, block=0)
    return builder.build()


@log_operation("Make bicol")
def make_bicol(beta: int, p: int, n: int, n1: int, n2: int) -> Structure:
    """Gadget whose top run is colored for n1 and bottom run for n2."""
    _check_run_values(n, n1, n2)
    return make_bicolit(beta, p, n, n1, n2, 1)


@log_operation("Make bicolit")
def make_bicolit(beta: int, p: int, n: int, n1: int, n2: int, m: int, *, node_cap: int | None = None) -> Structure:
    """Concatenation of m bicols sharing consecutive endpoints."""
    _check_run_values(n, n1, n2)
    if m < 1 or p < 1 or n < 1 or beta < 0:
        msg = "need m, p, n >= 1 and beta >= 0"
        raise DomainError(msg)
    _check_cap(bicolit_size(beta, p, n, m), node_cap)
    builder = StructureBuilder()
    _add_bicolit(builder, beta, p, n, (n1, n2), m, block=0)
    return builder.build()


def _build_pw_chain(plan: PwPlan, values: list[tuple[int, int]], node_cap: int | None) -> Structure:
    size = len(values) * bicolit_size(plan.beta, plan.p, plan.n, plan.m) + (len(values) // 2) * (plan.l - 1)
    _check_cap(size, node_cap)
    builder = StructureBuilder()
    previous_end: int | None = None
    for block, pair in enumerate(values):
        start, end = _add_bicolit(builder, plan.beta, plan.p, plan.n, pair, plan.m, block=block)
        if previous_end is not None:
            # odd gaps close a group with one edge; even gaps hold a length-l path
            length = plan.l if block % 2 else 1
            builder.add_path(
                previous_end,
                start,
                length,
                {pos: Annotation(role=Role.CONNECTOR, block=block - 1, position=pos) for pos in range(1, length)},
            )
        previous_end = end
    return builder.build()


def _require_odd(plan: PwPlan) -> None:
    if plan.n % 2 == 0:
        msg = f"the pathwidth construction needs n odd, got {plan.n}"
        raise PlanError(msg)


@log_operation("Build pathwidth G")
def build_pw_G(plan: PwPlan, *, node_cap: int | None = None) -> Structure:  # noqa: N802
    """Pairs of Bicolit(2i, 2i+1) joined by length-l paths, groups by edges."""
    _require_odd(plan)
    values = [(2 * i, 2 * i + 1) for i in range((plan.n + 1) // 2) for _ in range(2)]
    return _build_pw_chain(plan, values, node_cap)


@log_operation("Build pathwidth H")
def build_pw_H(plan: PwPlan, *, node_cap: int | None = None) -> Structure:  # noqa: N802
    """Bicolit(i, i) for i = 0..n, paired by length-l paths, groups by edges."""
    _require_odd(plan)
    values = [(i, i) for i in range(plan.n + 1)]
    return _build_pw_chain(plan, values, node_cap)


# ----------------------------------------------------------------------
# Lozenges and word labels


def loz_internal_size(p: int, l: int) -> int:  # noqa: E741
    """Nodes of one lozenge copy besides its two sources."""
    return 2 * (2 ** (p + 1) - 2) + 2**p * (l - 1)


def _add_loz(builder: StructureBuilder, a: int, b: int, p: int, l: int, *, copy: int) -> None:  # noqa: E741
    leaves: dict[Side, list[int]] = {}
    for side, source in ((Side.TOP, a), (Side.BOTTOM, b)):
        heap = {1: source}
        for index in range(2, 2 ** (p + 1)):
            leaf = index >= 2**p
            heap[index] = builder.add_element(
                annotation=Annotation(
                    role=Role.LOZ_LEAF if leaf else Role.LOZ_TREE,
                    side=side,
                    position=index,
                    copy_index=copy,
                    pair=index - 2**p if leaf else None,
                )
            )
            builder.add_edge(heap[index // 2], heap[index])
        leaves[side] = [heap[i] for i in range(2**p, 2 ** (p + 1))]
    for pair, (top, bottom) in enumerate(zip(leaves[Side.TOP], leaves[Side.BOTTOM], strict=True)):
        builder.add_path(
            top,
            bottom,
            l,
            {pos: Annotation(role=Role.LOZ_PATH, pair=pair, position=pos, copy_index=copy) for pos in range(1, l)},
        )


@log_operation("Make lozenge")
def make_loz(p: int, l: int) -> Structure:  # noqa: E741
    """Two height-p binary trees whose i-th leaves are joined by length-l paths."""
    if p < 1 or l < 1:
        msg = "need p, l >= 1"
        raise DomainError(msg)
    builder = StructureBuilder()
    a = builder.add_element(annotation=Annotation(role=Role.SOURCE_S, index=0))
    b = builder.add_element(annotation=Annotation(role=Role.SOURCE_T, index=1))
    _add_loz(builder, a, b, p, l, copy=0)
    return builder.build()


def _add_label(builder: StructureBuilder, x: int, word: str) -> None:
    previous = x
    for pos, bit in enumerate(word):
        node = builder.add_element(
            color=BIT_COLORS[bit],
            annotation=Annotation(role=Role.LABEL_PATH, word=word, position=pos),
        )
        builder.add_edge(previous, node)
        previous = node


def attach_word_label(structure: Structure, x: int, word: str) -> Structure:
    """Hang a path of len(word) nodes off x, the i-th colored by bit i."""
    structure.check_element(x)
    if any(bit not in BIT_COLORS for bit in word):
        msg = f"label {word!r} is not a bit string"
        raise DomainError(msg)
    builder = StructureBuilder.extending(structure)
    _add_label(builder, x, word)
    return builder.build()


def lozenge_copies(structure: Structure) -> dict[int, tuple[int, int]]:
    """Sources (top, bottom) of each lozenge copy, read from annotations.

    Raises:
        AnnotationError: If a copy's sources cannot be identified
    """
    tops: dict[int, set[int]] = {}
    bottoms: dict[int, set[int]] = {}
    for x, ann in structure.annotations.items():
        if ann.role in (Role.LOZ_TREE, Role.LOZ_LEAF) and ann.position in (2, 3) and ann.copy_index is not None:
            target = tops if ann.side == Side.TOP else bottoms
            target.setdefault(ann.copy_index, set()).update(
                y
                for y in structure.neighbors(x)
                if structure.annotation(y).role not in (Role.LOZ_TREE, Role.LOZ_LEAF, Role.LOZ_PATH)
            )
    copies: dict[int, tuple[int, int]] = {}
    for copy in sorted(set(tops) | set(bottoms)):
        top, bottom = tops.get(copy, set()), bottoms.get(copy, set())
        if len(top) != 1 or len(bottom) != 1:
            msg = f"lozenge copy {copy} has no identifiable sources"
            raise AnnotationError(msg)
        copies[copy] = (next(iter(top)), next(iter(bottom)))
    return copies


def loz_disjoint_paths(structure: Structure, copy: int = 0) -> int:
    """Vertex-disjoint paths between the two leaf sets of one lozenge copy.

    Raises:
        AnnotationError: If the copy does not exist
    """
    members = [
        x
        for x, ann in structure.annotations.items()
        if ann.copy_index == copy and ann.role in (Role.LOZ_TREE, Role.LOZ_LEAF, Role.LOZ_PATH)
    ]
    if not members:
        msg = f"no lozenge copy {copy}"
        raise AnnotationError(msg)
    graph = nx.Graph(structure.gaifman.subgraph(members))
    for x in members:
        ann = structure.annotation(x)
        if ann.role == Role.LOZ_LEAF:
            graph.add_edge(("terminal", ann.side), x)
    return local_node_connectivity(graph, ("terminal", Side.TOP), ("terminal", Side.BOTTOM))


# ----------------------------------------------------------------------
# Treewidth construction


def words_up_to(n: int) -> list[str]:
    """All bit strings of length at most n in shortlex order."""
    return ["".join(bits) for length in range(n + 1) for bits in itertools.product("01", repeat=length)]


def shortlex(word: str) -> tuple[int, str]:
    """Sort key: length first, then lexicographic."""
    return (len(word), word)


def inter_htree_links(plan: TwPlan) -> list[tuple[str, str]]:
    """Lozenge links between leaves ending in 1 of every pair of h-trees.

    Leaves are taken greedily in lexicographic order, each at most once.

    Raises:
        PlanError: If some h-tree runs out of leaves
    """
    c = 2 * plan.k + 3
    prefixes = ["".join(bits) for bits in itertools.product("01", repeat=plan.h)]
    if len(prefixes) < 2:  # noqa: PLR2004
        return []
    available = {
        u: iter(u + "".join(rest) + "1" for rest in itertools.product("01", repeat=plan.n - plan.h - 1))
        for u in prefixes
    }
    links = []
    for u, v in itertools.combinations(prefixes, 2):
        for _ in range(c):
            try:
                links.append((next(available[u]), next(available[v])))
            except StopIteration as e:
                msg = f"h-trees {u!r} and {v!r} have fewer than {c} free leaves"
                raise PlanError(msg) from e
    return links


def _chain_links(words: list[str], links: list[tuple[str, str]]) -> list[tuple[str, str]]:
    """Links joining the path components end to start, by least word."""
    graph = nx.Graph()
    graph.add_nodes_from(words)
    graph.add_edges_from(links)
    components = []
    for component in nx.connected_components(graph):
        ends = sorted((w for w in component if graph.degree[w] <= 1), key=shortlex)
        if len(ends) not in (1, 2) or (len(ends) == 1 and len(component) > 1):
            msg = "lozenge links do not form paths"
            raise PlanError(msg)
        least = min(component, key=shortlex)
        components.append((shortlex(least), ends[0], ends[-1]))
    components.sort()
    return [(components[i][2], components[i + 1][1]) for i in range(len(components) - 1)]


def tw_links(plan: TwPlan, flavour: str) -> list[tuple[str, str]]:
    """All source pairs joined by a lozenge, in creation order.

    Args:
        plan: Treewidth plan
        flavour: "G" links w to w0, "H" links w to w1
    """
    if flavour not in ("G", "H"):
        msg = f"unknown flavour {flavour!r}"
        raise DomainError(msg)
    words = words_up_to(plan.n)
    bit = "0" if flavour == "G" else "1"
    links = [(w, w + bit) for w in words if len(w) < plan.n]
    if flavour == "G":
        links += inter_htree_links(plan)
    return links + _chain_links(words, links)


def _build_tw(plan: TwPlan, flavour: str, node_cap: int | None) -> Structure:
    words = words_up_to(plan.n)
    label_nodes = sum(len(w) for w in words)
    _check_cap(len(words) + label_nodes + (len(words) - 1) * loz_internal_size(plan.p, plan.l), node_cap)

    builder = StructureBuilder()
    source: dict[str, int] = {}
    for w in words:
        htree = w[: plan.h] if len(w) >= plan.h else None
        source[w] = builder.add_element(annotation=Annotation(role=Role.SOURCE_WORD, word=w, htree=htree))
        _add_label(builder, source[w], w)
    links = tw_links(plan, flavour)
    for copy, (u, v) in enumerate(links):
        _add_loz(builder, source[u], source[v], plan.p, plan.l, copy=copy)
    logger.debug("Treewidth structure built", extra={"flavour": flavour, "copies": len(links)})
    return builder.build()


@log_operation("Build treewidth G")
def build_tw_G(plan: TwPlan, *, node_cap: int | None = None) -> Structure:  # noqa: N802
    """Word-labeled sources chained by lozenges along w -> w0."""
    return _build_tw(plan, "G", node_cap)


@log_operation("Build treewidth H")
def build_tw_H(plan: TwPlan, *, node_cap: int | None = None) -> Structure:  # noqa: N802
    """Word-labeled sources chained by lozenges along w -> w1."""
    return _build_tw(plan, "H", node_cap)
