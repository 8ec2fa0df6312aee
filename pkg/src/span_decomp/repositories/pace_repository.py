"""PACE graph (.gr) and tree decomposition (.td) files.

Vertices and bags are numbered from 1 on disk and from 0 in memory.
"""

from __future__ import annotations

from collections import deque
from pathlib import Path
from typing import TYPE_CHECKING

import networkx as nx

from span_decomp.exceptions import ParseError
from span_decomp.models.decomposition import ClassicalDecomposition
from span_decomp.services.structures import from_edges

if TYPE_CHECKING:
    from span_decomp.models.structure import Structure

_GR_HEADER_FIELDS = 4
_TD_HEADER_FIELDS = 5


def _data_lines(text: str) -> list[tuple[int, list[str]]]:
    """Non-comment lines with their 1-based numbers."""
    rows = []
    for number, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if line and not line.startswith("c"):
            rows.append((number, line.split()))
    return rows


def _ints(fields: list[str], line: int, path: str | None) -> list[int]:
    try:
        return [int(f) for f in fields]
    except ValueError as e:
        msg = f"expected integers, got {' '.join(fields)!r}"
        raise ParseError(msg, path=path, line=line) from e


def parse_gr(text: str, *, path: str | None = None) -> Structure:
    """Read a graph in 'p tw n m' format as an uncoloured structure.

    Raises:
        ParseError: On a missing or repeated header, a bad edge line or a
            vertex outside 1..n
    """
    rows = _data_lines(text)
    if not rows or rows[0][1][0] != "p":
        msg = "missing 'p tw n m' header"
        raise ParseError(msg, path=path, line=rows[0][0] if rows else None)
    number, header = rows[0]
    if len(header) != _GR_HEADER_FIELDS or header[1] != "tw":
        msg = "header must read 'p tw n m'"
        raise ParseError(msg, path=path, line=number)
    size, declared = _ints(header[2:], number, path)
    edges: list[tuple[int, int]] = []
    for number, fields in rows[1:]:
        if fields[0] == "p":
            msg = "repeated header"
            raise ParseError(msg, path=path, line=number)
        if len(fields) != 2:  # noqa: PLR2004
            msg = "edge lines hold exactly two vertices"
            raise ParseError(msg, path=path, line=number)
        u, v = _ints(fields, number, path)
        for w in (u, v):
            if not 1 <= w <= size:
                msg = f"vertex {w} outside 1..{size}"
                raise ParseError(msg, path=path, line=number)
        edges.append((u - 1, v - 1))
    if len(edges) != declared:
        msg = f"header declares {declared} edges, found {len(edges)}"
        raise ParseError(msg, path=path, line=rows[0][0])
    return from_edges(size, edges)


def parse_td(text: str, *, path: str | None = None) -> tuple[int, ClassicalDecomposition]:
    """Read an 's td' file as a classical decomposition rooted at bag 1.

    Returns:
        Declared width and the decomposition over 0-based vertices

    Raises:
        ParseError: On malformed lines, unknown bags or a non-tree
    """
    rows = _data_lines(text)
    if not rows or rows[0][1][:2] != ["s", "td"] or len(rows[0][1]) != _TD_HEADER_FIELDS:
        msg = "missing 's td bags width+1 n' header"
        raise ParseError(msg, path=path, line=rows[0][0] if rows else None)
    number, header = rows[0]
    count, bag_size, size = _ints(header[2:], number, path)
    bags: dict[int, frozenset[int]] = {}
    tree = nx.Graph()
    for number, fields in rows[1:]:
        if fields[0] == "b":
            values = _ints(fields[1:], number, path)
            if not values or not 1 <= values[0] <= count:
                msg = "bag id out of range"
                raise ParseError(msg, path=path, line=number)
            if any(not 1 <= v <= size for v in values[1:]):
                msg = f"bag vertex outside 1..{size}"
                raise ParseError(msg, path=path, line=number)
            bags[values[0] - 1] = frozenset(v - 1 for v in values[1:])
            continue
        if len(fields) != 2:  # noqa: PLR2004
            msg = "tree edge lines hold exactly two bag ids"
            raise ParseError(msg, path=path, line=number)
        a, b = _ints(fields, number, path)
        tree.add_edge(a - 1, b - 1)
    if len(bags) != count:
        msg = f"header declares {count} bags, found {len(bags)}"
        raise ParseError(msg, path=path, line=rows[0][0])
    if set(tree) - set(bags):
        msg = "tree edge references an unknown bag"
        raise ParseError(msg, path=path)
    tree.add_nodes_from(bags)
    if not nx.is_tree(tree):
        msg = "bags do not form a tree"
        raise ParseError(msg, path=path)

    root = min(bags)
    parent: dict[int, int | None] = {root: None}
    queue = deque([root])
    while queue:
        t = queue.popleft()
        for u in sorted(tree.adj[t]):
            if u not in parent:
                parent[u] = t
                queue.append(u)
    return bag_size - 1, ClassicalDecomposition(parent=parent, bags=bags)


def format_gr(structure: Structure, relation: str = "E") -> str:
    """Write the edges of a structure in 'p tw n m' format."""
    edges = sorted({tuple(sorted(t)) for t in structure.tuples(relation) if t[0] != t[1]})
    lines = [f"p tw {structure.size} {len(edges)}"]
    lines.extend(f"{a + 1} {b + 1}" for a, b in edges)
    return "\n".join(lines) + "\n"


def format_td(decomposition: ClassicalDecomposition, size: int) -> str:
    """Write a classical decomposition in 's td' format, bags renumbered from 1."""
    ids = {t: i + 1 for i, t in enumerate(sorted(decomposition.parent))}
    width = max(len(b) for b in decomposition.bags.values())
    lines = [f"s td {len(ids)} {width} {size}"]
    for t, i in ids.items():
        members = " ".join(str(x + 1) for x in sorted(decomposition.bags[t]))
        lines.append(f"b {i} {members}".rstrip())
    lines.extend(
        f"{ids[up]} {ids[t]}" for t, up in sorted(decomposition.parent.items()) if up is not None
    )
    return "\n".join(lines) + "\n"


class PaceRepository:
    """Reads PACE files from disk."""

    def __init__(self, base: Path | str = ".") -> None:
        """Initialize repository.

        Args:
            base: Directory relative paths are resolved against
        """
        self._base = Path(base)

    def _text(self, name: Path | str) -> tuple[str, str]:
        path = Path(name)
        path = path if path.is_absolute() else self._base / path
        try:
            return path.read_text(encoding="utf-8"), str(path)
        except OSError as e:
            msg = f"cannot read file: {e.strerror}"
            raise ParseError(msg, path=str(path)) from e

    def load_graph(self, name: Path | str) -> Structure:
        """Read a .gr file."""
        text, path = self._text(name)
        return parse_gr(text, path=path)

    def load_decomposition(self, name: Path | str) -> tuple[int, ClassicalDecomposition]:
        """Read a .td file."""
        text, path = self._text(name)
        return parse_td(text, path=path)
