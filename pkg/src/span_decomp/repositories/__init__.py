"""File formats: JSON documents, PACE files and DOT export."""

from __future__ import annotations

from span_decomp.repositories.dot_exporter import (
    decomposition_to_dot,
    structure_to_dot,
    write_dot,
)
from span_decomp.repositories.json_repository import (
    JsonRepository,
    decomposition_from_document,
    decomposition_to_document,
    dumps,
    structure_from_document,
    structure_to_document,
)
from span_decomp.repositories.pace_repository import (
    PaceRepository,
    format_gr,
    format_td,
    parse_gr,
    parse_td,
)

__all__ = [
    "JsonRepository",
    "PaceRepository",
    "decomposition_from_document",
    "decomposition_to_document",
    "decomposition_to_dot",
    "dumps",
    "format_gr",
    "format_td",
    "parse_gr",
    "parse_td",
    "structure_from_document",
    "structure_to_document",
    "structure_to_dot",
    "write_dot",
]
