"""JSON files for structures, decompositions and reports."""

from __future__ import annotations

import json
from pathlib import Path
from typing import TYPE_CHECKING, Any

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from span_decomp.exceptions import ParseError
from span_decomp.models.decomposition import KBag, TreeDecomposition
from span_decomp.models.structure import (
    Annotation,
    RelationSymbol,
    Structure,
    Vocabulary,
)

if TYPE_CHECKING:
    from collections.abc import Iterable


class NodeEntry(BaseModel):
    """One element of a structure file."""

    model_config = ConfigDict(extra="forbid")

    id: int = Field(..., ge=0)
    colors: list[str] = Field(default_factory=list, description="unary predicates holding at the element")
    annotation: Annotation | None = Field(default=None)


class StructureFile(BaseModel):
    """On-disk form of a structure."""

    model_config = ConfigDict(extra="forbid")

    vocabulary: list[RelationSymbol]
    symmetric_edges: bool = Field(default=True)
    nodes: list[NodeEntry]
    tuples: dict[str, list[list[int]]] = Field(default_factory=dict)


class BagElement(BaseModel):
    """One local element of a bag."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    local: int = Field(..., ge=0)
    colors: list[str] = Field(default_factory=list)
    in_mark: int | None = Field(default=None, alias="in", ge=0)
    out_mark: int | None = Field(default=None, alias="out", ge=0)
    origin: int | None = Field(default=None, ge=0)


class BagEntry(BaseModel):
    """Contents of one bag."""

    model_config = ConfigDict(extra="forbid")

    elements: list[BagElement]
    tuples: dict[str, list[list[int]]] = Field(default_factory=dict)


class TreeNodeEntry(BaseModel):
    """One node of a decomposition file."""

    model_config = ConfigDict(extra="forbid")

    id: int
    parent: int | None = Field(default=None)
    bag: BagEntry


class DecompositionFile(BaseModel):
    """On-disk form of a k-bag decomposition."""

    model_config = ConfigDict(extra="forbid")

    k: int = Field(..., ge=0)
    vocabulary: list[RelationSymbol]
    symmetric_edges: bool = Field(default=True)
    nodes: list[TreeNodeEntry]


# ----------------------------------------------------------------------
# Conversion


def _unary_names(vocabulary: Vocabulary) -> set[str]:
    return {r.name for r in vocabulary.relations if r.arity == 1}


def _tuples_of(structure: Structure) -> dict[str, list[list[int]]]:
    unary = _unary_names(structure.vocabulary)
    return {
        name: [list(t) for t in sorted(structure.tuples(name))]
        for name in sorted(structure.relations)
        if name not in unary and structure.tuples(name)
    }


def _relations_from(
    vocabulary: Vocabulary,
    colors: Iterable[tuple[int, Iterable[str]]],
    tuples: dict[str, list[list[int]]],
) -> dict[str, frozenset[tuple[int, ...]]]:
    relations: dict[str, set[tuple[int, ...]]] = {}
    unary = _unary_names(vocabulary)
    for x, names in colors:
        for name in names:
            if name not in unary:
                msg = f"{name} is not a unary predicate of the vocabulary"
                raise ParseError(msg)
            relations.setdefault(name, set()).add((x,))
    for name, rows in tuples.items():
        relations.setdefault(name, set()).update(tuple(r) for r in rows)
    return {name: frozenset(v) for name, v in relations.items()}


def structure_to_document(structure: Structure) -> dict[str, Any]:
    """Normalized JSON-ready form of a structure."""
    document = StructureFile(
        vocabulary=list(structure.vocabulary.relations),
        symmetric_edges=structure.symmetric_edges,
        nodes=[
            NodeEntry(
                id=x,
                colors=sorted(structure.unary_of.get(x, ())),
                annotation=structure.annotations.get(x),
            )
            for x in structure.elements
        ],
        tuples=_tuples_of(structure),
    )
    return document.model_dump(mode="json", by_alias=True, exclude_none=True)


def structure_from_document(data: Any, *, source: str | None = None) -> Structure:
    """Build a structure from its JSON form.

    Raises:
        ParseError: If the document is malformed or inconsistent
    """
    try:
        document = StructureFile.model_validate(data)
        ids = sorted(n.id for n in document.nodes)
        if ids != list(range(len(ids))):
            msg = "node ids must be 0..n-1"
            raise ParseError(msg, path=source)
        vocabulary = Vocabulary(relations=tuple(document.vocabulary))
        return Structure(
            vocabulary=vocabulary,
            size=len(ids),
            relations=_relations_from(vocabulary, ((n.id, n.colors) for n in document.nodes), document.tuples),
            symmetric_edges=document.symmetric_edges,
            annotations={n.id: n.annotation for n in document.nodes if n.annotation is not None},
        )
    except ValidationError as e:
        msg = f"invalid structure document: {e.errors()[0]['msg']}"
        raise ParseError(msg, path=source) from e
    except ParseError as e:
        raise ParseError(e.message, path=source, line=e.line) from e


def _shared_vocabulary(decomposition: TreeDecomposition) -> Vocabulary:
    vocabulary = Vocabulary(relations=())
    for t in decomposition.nodes:
        vocabulary = vocabulary.union(decomposition.bags[t].content.vocabulary)
    return vocabulary


def decomposition_to_document(decomposition: TreeDecomposition) -> dict[str, Any]:
    """Normalized JSON-ready form of a decomposition."""
    td = decomposition
    first = td.bags[td.nodes[0]].content
    nodes = []
    for t in td.nodes:
        bag = td.bags[t]
        ins = {local: i for i, local in bag.in_marks.items()}
        outs = {local: i for i, local in bag.out_marks.items()}
        elements = [
            BagElement(
                local=x,
                colors=sorted(bag.content.unary_of.get(x, ())),
                in_mark=ins.get(x),
                out_mark=outs.get(x),
                origin=bag.origins[x] if bag.origins is not None else None,
            )
            for x in bag.content.elements
        ]
        nodes.append(
            TreeNodeEntry(id=t, parent=td.parent[t], bag=BagEntry(elements=elements, tuples=_tuples_of(bag.content)))
        )
    document = DecompositionFile(
        k=td.k,
        vocabulary=list(_shared_vocabulary(td).relations),
        symmetric_edges=first.symmetric_edges,
        nodes=nodes,
    )
    return document.model_dump(mode="json", by_alias=True, exclude_none=True)


def _bag_from_entry(entry: BagEntry, vocabulary: Vocabulary, symmetric_edges: bool) -> KBag:
    locals_ = sorted(e.local for e in entry.elements)
    if locals_ != list(range(len(locals_))):
        msg = "bag locals must be 0..size-1"
        raise ParseError(msg)
    ordered = sorted(entry.elements, key=lambda e: e.local)
    content = Structure(
        vocabulary=vocabulary,
        size=len(ordered),
        relations=_relations_from(vocabulary, ((e.local, e.colors) for e in ordered), entry.tuples),
        symmetric_edges=symmetric_edges,
    )
    origins = [e.origin for e in ordered]
    return KBag(
        content=content,
        in_marks={e.in_mark: e.local for e in ordered if e.in_mark is not None},
        out_marks={e.out_mark: e.local for e in ordered if e.out_mark is not None},
        origins=tuple(o for o in origins if o is not None) if all(o is not None for o in origins) else None,
    )


def decomposition_from_document(data: Any, *, source: str | None = None) -> TreeDecomposition:
    """Build a decomposition from its JSON form.

    Raises:
        ParseError: If the document is malformed
    """
    try:
        document = DecompositionFile.model_validate(data)
        vocabulary = Vocabulary(relations=tuple(document.vocabulary))
        return TreeDecomposition(
            k=document.k,
            parent={n.id: n.parent for n in document.nodes},
            bags={n.id: _bag_from_entry(n.bag, vocabulary, document.symmetric_edges) for n in document.nodes},
        )
    except ValidationError as e:
        msg = f"invalid decomposition document: {e.errors()[0]['msg']}"
        raise ParseError(msg, path=source) from e
    except ParseError as e:
        raise ParseError(e.message, path=source, line=e.line) from e


def dumps(document: Any) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


class JsonRepository:
    """Reads and writes JSON documents under a base directory."""

    def __init__(self, base: Path | str = ".") -> None:
        """Initialize repository.

        Args:
            base: Directory relative paths are resolved against
        """
        self._base = Path(base)

    def _path(self, name: Path | str) -> Path:
        path = Path(name)
        return path if path.is_absolute() else self._base / path

    def _read(self, name: Path | str) -> Any:
        path = self._path(name)
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ParseError(e.msg, path=str(path), line=e.lineno) from e
        except OSError as e:
            msg = f"cannot read file: {e.strerror}"
            raise ParseError(msg, path=str(path)) from e

    def _write(self, name: Path | str, document: Any) -> Path:
        path = self._path(name)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(document), encoding="utf-8")
        return path

    def load_any(self, name: Path | str) -> Structure | TreeDecomposition:
        """Read a structure or decomposition file, told apart by its k field."""
        data = self._read(name)
        source = str(self._path(name))
        if isinstance(data, dict) and "k" in data:
            return decomposition_from_document(data, source=source)
        return structure_from_document(data, source=source)

    def load_structure(self, name: Path | str) -> Structure:
        """Read a structure file."""
        return structure_from_document(self._read(name), source=str(self._path(name)))

    def save_structure(self, structure: Structure, name: Path | str) -> Path:
        """Write a structure file."""
        return self._write(name, structure_to_document(structure))

    def load_decomposition(self, name: Path | str) -> TreeDecomposition:
        """Read a decomposition file."""
        return decomposition_from_document(self._read(name), source=str(self._path(name)))

    def save_decomposition(self, decomposition: TreeDecomposition, name: Path | str) -> Path:
        """Write a decomposition file."""
        return self._write(name, decomposition_to_document(decomposition))

    def save_model(self, model: BaseModel, name: Path | str) -> Path:
        """Write any report model."""
        return self._write(name, model.model_dump(mode="json", by_alias=True))
