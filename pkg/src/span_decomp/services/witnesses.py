"""Canonical decompositions of the generated structures."""

from __future__ import annotations

from collections import defaultdict
from enum import StrEnum
from typing import TYPE_CHECKING

from span_decomp.exceptions import AnnotationError
from span_decomp.models.decomposition import ClassicalDecomposition
from span_decomp.models.structure import Role, Side
from span_decomp.services.decompositions import encode_classical
from span_decomp.services.gadgets import lozenge_copies
from span_decomp.utils import log_operation

if TYPE_CHECKING:
    from collections.abc import Callable, Sequence

    from span_decomp.models.decomposition import TreeDecomposition
    from span_decomp.models.structure import Structure

Bag = frozenset[int]


class TwVariant(StrEnum):
    """Shape of the canonical treewidth decomposition."""

    SERIES_PARALLEL = "sp"
    SWEEP = "sweep"


def reduce_path(bags: Sequence[Bag]) -> list[Bag]:
    """Drop every bag contained in a neighbouring bag."""
    kept: list[Bag] = []
    for bag in bags:
        if kept and bag <= kept[-1]:
            continue
        while kept and kept[-1] <= bag:
            kept.pop()
        kept.append(bag)
    return kept


# ----------------------------------------------------------------------
# Pathwidth


def _ladder(top: list[int], bottom: list[int]) -> list[Bag]:
    """Move one step on the top path, then one on the bottom path."""
    bags = []
    for i in range(len(top) - 1):
        bags.append(frozenset((top[i], top[i + 1], bottom[i])))
        bags.append(frozenset((top[i + 1], bottom[i], bottom[i + 1])))
    return bags


@log_operation("Canonical path-decomposition")
def canonical_pd_pw(structure: Structure) -> TreeDecomposition:
    """Width-2 path-decomposition sweeping each gadget as a ladder.

    Works on any chain of bicolored gadgets built by the pathwidth
    generators; the order is read from the element annotations.

    Raises:
        AnnotationError: If junction or path annotations are missing
    """
    junctions: dict[tuple[int, int], int] = {}
    paths: dict[tuple[int, int, Side], list[tuple[int, int]]] = defaultdict(list)
    connectors: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for x, ann in structure.annotations.items():
        if ann.role in (Role.SOURCE_S, Role.SOURCE_T) and ann.block is not None and ann.index is not None:
            junctions[(ann.block, ann.index)] = x
        elif ann.role in (Role.PLAIN, Role.RUN_MEMBER) and ann.block is not None:
            if ann.copy_index is None or ann.side is None or ann.position is None:
                msg = f"element {x} lacks copy, side or position"
                raise AnnotationError(msg)
            paths[(ann.block, ann.copy_index, ann.side)].append((ann.position, x))
        elif ann.role == Role.CONNECTOR and ann.block is not None and ann.position is not None:
            connectors[ann.block].append((ann.position, x))
    if not junctions:
        msg = "structure carries no gadget junction annotations"
        raise AnnotationError(msg)

    blocks = sorted({b for b, _ in junctions})
    last_index = {b: max(i for bb, i in junctions if bb == b) for b in blocks}
    bags: list[Bag] = []
    for b in blocks:
        if b > blocks[0]:
            chain = [
                junctions[(b - 1, last_index[b - 1])],
                *(x for _, x in sorted(connectors[b - 1])),
                junctions[(b, 0)],
            ]
            bags.extend(frozenset(pair) for pair in zip(chain, chain[1:], strict=False))
        for j in range(last_index[b]):
            try:
                s, t = junctions[(b, j)], junctions[(b, j + 1)]
            except KeyError as e:
                msg = f"block {b} misses junction {e}"
                raise AnnotationError(msg) from e
            top = [s, *(x for _, x in sorted(paths[(b, j, Side.TOP)])), t]
            bottom = [s, *(x for _, x in sorted(paths[(b, j, Side.BOTTOM)])), t]
            if len(top) != len(bottom):
                msg = f"gadget {j} of block {b} has paths of different lengths"
                raise AnnotationError(msg)
            bags.extend(_ladder(top, bottom))

    return encode_classical(structure, ClassicalDecomposition.path(reduce_path(bags)))


# ----------------------------------------------------------------------
# Treewidth


class _Lozenges:
    """Lozenge copies, chain order and labels read from annotations."""

    def __init__(self, structure: Structure) -> None:
        self.structure = structure
        self.copies = lozenge_copies(structure)
        self.tree: dict[tuple[int, Side, int], int] = {}
        self.paths: dict[tuple[int, int], list[tuple[int, int]]] = defaultdict(list)
        labels: dict[str, list[tuple[int, int]]] = defaultdict(list)
        self.sources: list[int] = []
        words: dict[str, int] = {}
        for x, ann in sorted(structure.annotations.items()):
            if ann.role in (Role.LOZ_TREE, Role.LOZ_LEAF) and ann.copy_index is not None:
                if ann.side is None or ann.position is None:
                    msg = f"lozenge element {x} lacks side or position"
                    raise AnnotationError(msg)
                self.tree[(ann.copy_index, ann.side, ann.position)] = x
            elif ann.role == Role.LOZ_PATH and ann.copy_index is not None:
                if ann.pair is None or ann.position is None:
                    msg = f"lozenge path element {x} lacks pair or position"
                    raise AnnotationError(msg)
                self.paths[(ann.copy_index, ann.pair)].append((ann.position, x))
            elif ann.role == Role.LABEL_PATH and ann.word is not None and ann.position is not None:
                labels[ann.word].append((ann.position, x))
            elif ann.role in (Role.SOURCE_WORD, Role.SOURCE_S, Role.SOURCE_T):
                self.sources.append(x)
                if ann.word is not None:
                    words[ann.word] = x
        if not self.sources:
            msg = "structure carries no lozenge source annotations"
            raise AnnotationError(msg)
        for (copy, _, _), _x in self.tree.items():
            if copy not in self.copies:
                msg = f"lozenge copy {copy} has no sources"
                raise AnnotationError(msg)
        self.labels = {
            words[w]: [x for _, x in sorted(nodes)] for w, nodes in labels.items() if w in words
        }
        self.p = max((pos for (_, _, pos) in self.tree), default=1).bit_length() - 1
        for c, (a, b) in self.copies.items():
            self.tree[(c, Side.TOP, 1)] = a
            self.tree[(c, Side.BOTTOM, 1)] = b

    def chain(self) -> list[tuple[int, int, int]]:
        """(copy, from, to) in path order, starting at the least free end."""
        around: dict[int, list[tuple[int, int]]] = defaultdict(list)
        for c, (a, b) in sorted(self.copies.items()):
            around[a].append((c, b))
            around[b].append((c, a))
        if not around:
            return []
        ends = sorted(x for x, links in around.items() if len(links) == 1)
        if len(ends) != 2 or any(len(links) > 2 for links in around.values()):  # noqa: PLR2004
            msg = "lozenge copies do not form a single chain"
            raise AnnotationError(msg)
        steps: list[tuple[int, int, int]] = []
        current, used = ends[0], set()
        while True:
            nxt = [(c, y) for c, y in around[current] if c not in used]
            if not nxt:
                break
            c, y = nxt[0]
            used.add(c)
            steps.append((c, current, y))
            current = y
        if len(used) != len(self.copies):
            msg = "lozenge copies do not form a single chain"
            raise AnnotationError(msg)
        return steps

    def channel(self, copy: int, pair: int) -> list[int]:
        """Leaf-to-leaf path of one channel, including both leaves."""
        top = self.tree[(copy, Side.TOP, 2**self.p + pair)]
        bottom = self.tree[(copy, Side.BOTTOM, 2**self.p + pair)]
        return [top, *(x for _, x in sorted(self.paths[(copy, pair)])), bottom]

    def layers(self, copy: int) -> list[list[int]]:
        """Node layers from the top source to the bottom source."""
        width = 2**self.p
        top = [[self.tree[(copy, Side.TOP, i)] for i in range(2**d, 2 ** (d + 1))] for d in range(self.p + 1)]
        channels = [self.channel(copy, i) for i in range(width)]
        middle = [[ch[pos] for ch in channels] for pos in range(1, len(channels[0]) - 1)]
        bottom = [[self.tree[(copy, Side.BOTTOM, i)] for i in range(2**d, 2 ** (d + 1))] for d in range(self.p, -1, -1)]
        return [*top, *middle, *bottom]


class _TreeBuilder:
    def __init__(self) -> None:
        self.parent: dict[int, int | None] = {}
        self.bags: dict[int, Bag] = {}

    def add(self, bag: Bag, parent: int | None) -> int:
        node = len(self.bags)
        self.bags[node] = bag
        self.parent[node] = parent
        return node

    def add_chain(self, bags: Sequence[Bag], parent: int | None) -> list[int]:
        nodes = []
        for bag in bags:
            parent = self.add(bag, parent)
            nodes.append(parent)
        return nodes

    def decomposition(self) -> ClassicalDecomposition:
        return ClassicalDecomposition(parent=self.parent, bags=self.bags)


def _label_chain(source: int, label: list[int]) -> list[Bag]:
    chain = [source, *label]
    return [frozenset(pair) for pair in zip(chain, chain[1:], strict=False)]


def _sp_lozenge(builder: _TreeBuilder, loz: _Lozenges, copy: int, parent: int, heap: int) -> None:
    a = loz.tree[(copy, Side.TOP, heap)]
    b = loz.tree[(copy, Side.BOTTOM, heap)]
    if heap >= 2**loz.p:
        path = loz.channel(copy, heap - 2**loz.p)
        builder.add_chain([frozenset((path[i], path[i + 1], b)) for i in range(len(path) - 1)], parent)
        return
    for child in (2 * heap, 2 * heap + 1):
        a_child = loz.tree[(copy, Side.TOP, child)]
        b_child = loz.tree[(copy, Side.BOTTOM, child)]
        cross = builder.add(frozenset((a, b, b_child)), parent)
        step = builder.add(frozenset((a, a_child, b_child)), cross)
        _sp_lozenge(builder, loz, copy, step, child)


def _zipper(path: list[int]) -> list[Bag]:
    """Fold a path in half: bag i holds edge i and its mirror edge."""
    last = len(path) - 1
    return [
        frozenset((path[i], path[i + 1], path[last - i - 1], path[last - i])) for i in range((last + 1) // 2)
    ]


def _sweep_lozenge(builder: _TreeBuilder, loz: _Lozenges, copy: int, parent: int, heap: int) -> None:
    a = loz.tree[(copy, Side.TOP, heap)]
    b = loz.tree[(copy, Side.BOTTOM, heap)]
    if heap >= 2**loz.p:
        builder.add_chain(_zipper(loz.channel(copy, heap - 2**loz.p)), parent)
        return
    for child in (2 * heap, 2 * heap + 1):
        a_child = loz.tree[(copy, Side.TOP, child)]
        b_child = loz.tree[(copy, Side.BOTTOM, child)]
        level = builder.add(frozenset((a, b, a_child, b_child)), parent)
        _sweep_lozenge(builder, loz, copy, level, child)


def _along_chain(
    loz: _Lozenges, lozenge: Callable[[_TreeBuilder, _Lozenges, int, int, int], None]
) -> ClassicalDecomposition:
    """Spine of source-pair bags, one per lozenge, with labels hung off each source."""
    builder = _TreeBuilder()
    holder: dict[int, int] = {}
    previous: int | None = None
    for copy, start, end in loz.chain():
        previous = builder.add(frozenset((start, end)), previous)
        holder.setdefault(start, previous)
        holder.setdefault(end, previous)
        lozenge(builder, loz, copy, previous, 1)
    if previous is None:
        only = loz.sources[0]
        holder[only] = builder.add(frozenset((only,)), None)
    for source, label in sorted(loz.labels.items()):
        builder.add_chain(_label_chain(source, label), holder[source])
    return builder.decomposition()


@log_operation("Canonical tree-decomposition")
def canonical_td_tw(structure: Structure, variant: TwVariant | str = TwVariant.SERIES_PARALLEL) -> TreeDecomposition:
    """Decomposition of a labeled lozenge chain.

    The series-parallel variant has width 2 and unbounded span. The sweep
    variant goes down each lozenge one level at a time, one bag per pair
    of twin tree nodes, and folds every channel in half. Its bags hold at
    most four elements, so the width stays within 2^p + 1 for p >= 1, and
    its span is at most 3.

    Raises:
        AnnotationError: If lozenge or label annotations are missing
    """
    loz = _Lozenges(structure)
    variant = TwVariant(variant)
    lozenge = _sp_lozenge if variant == TwVariant.SERIES_PARALLEL else _sweep_lozenge
    return encode_classical(structure, _along_chain(loz, lozenge))
