"""Graphviz DOT export."""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from span_decomp.models.decomposition import TreeDecomposition
    from span_decomp.models.structure import Structure

_FILL = {"P0": "white", "P1": "black"}
_FONT = {"P0": "black", "P1": "white"}


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def structure_to_dot(structure: Structure, *, name: str = "structure") -> str:
    """Undirected drawing of the Gaifman graph with P0 white and P1 black."""
    lines = [f"graph {_quote(name)} {{", "  node [shape=circle, style=filled, fillcolor=gray80];"]
    for x in structure.elements:
        attrs = [f"label={_quote(str(x))}"]
        color = structure.color_of(x)
        if color in _FILL:
            attrs += [f"fillcolor={_FILL[color]}", f"fontcolor={_FONT[color]}"]
        if x in structure.annotations:
            described = ", ".join(f"{k}={v}" for k, v in sorted(structure.annotations[x].compact().items()))
            attrs.append(f"tooltip={_quote(described)}")
        lines.append(f"  {x} [{', '.join(attrs)}];")
    lines.extend(f"  {a} -- {b};" for a, b in sorted(structure.gaifman.edges))
    lines.append("}")
    return "\n".join(lines) + "\n"


def decomposition_to_dot(decomposition: TreeDecomposition, *, name: str = "decomposition") -> str:
    """Rooted tree drawing; each node lists its bag's origins or size and class digest."""
    td = decomposition
    lines = [f"digraph {_quote(name)} {{", "  node [shape=box];"]
    for t in td.nodes:
        bag = td.bags[t]
        held = "{" + ", ".join(map(str, bag.origins)) + "}" if bag.origins is not None else f"|bag|={bag.size}"
        lines.append(f"  {t} [label={_quote(f'{t}: {held}')}, tooltip={_quote(bag.bag_class.digest)}];")
    lines.extend(f"  {up} -> {t};" for t, up in sorted(td.parent.items()) if up is not None)
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_dot(text: str, path: Path | str) -> Path:
    """Write DOT text to a file."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    return target
