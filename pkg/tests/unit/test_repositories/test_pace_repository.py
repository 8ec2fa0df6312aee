"""Unit tests for PACE .gr and .td files."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from span_decomp.exceptions import ParseError
from span_decomp.models.decomposition import ClassicalDecomposition
from span_decomp.repositories.pace_repository import PaceRepository, format_gr, format_td, parse_gr, parse_td
from span_decomp.services.decompositions import encode_classical, width
from span_decomp.services.structures import cycle

if TYPE_CHECKING:
    from pathlib import Path

    from span_decomp.models.structure import Structure

PATH_GR = """c a path on three vertices
p tw 3 2
1 2
2 3
"""

PATH_TD = """c two bags
s td 2 2 3
b 1 1 2
b 2 2 3
1 2
"""


class TestParseGr:
    """Tests for parse_gr."""

    def test_reads_edges(self) -> None:
        """Test vertices are shifted to 0-based ids."""
        structure = parse_gr(PATH_GR)

        assert structure.size == 3
        assert structure.tuples("E") == {(0, 1), (1, 2)}

    def test_isolated_vertices(self) -> None:
        """Test vertices without edges still count."""
        structure = parse_gr("p tw 4 1\n1 4\n")

        assert structure.size == 4
        assert structure.tuples("E") == {(0, 3)}

    def test_missing_header(self) -> None:
        """Test the header must come first."""
        with pytest.raises(ParseError, match="missing 'p tw n m' header"):
            parse_gr("1 2\n")

    def test_edge_count_mismatch(self) -> None:
        """Test the declared edge count is checked at the header line."""
        with pytest.raises(ParseError, match="header declares 3 edges, found 2") as info:
            parse_gr(PATH_GR.replace("p tw 3 2", "p tw 3 3"), path="g.gr")

        assert info.value.line == 2

    def test_vertex_out_of_range(self) -> None:
        """Test vertices beyond n are reported with their line."""
        with pytest.raises(ParseError) as info:
            parse_gr("p tw 3 1\nc comment\n1 4\n", path="g.gr")

        assert str(info.value) == "g.gr:3: vertex 4 outside 1..3"

    def test_repeated_header(self) -> None:
        """Test a second header is rejected."""
        with pytest.raises(ParseError, match="repeated header"):
            parse_gr("p tw 2 0\np tw 2 0\n")

    def test_not_integers(self) -> None:
        """Test non-numeric fields are rejected."""
        with pytest.raises(ParseError, match="expected integers"):
            parse_gr("p tw 2 1\n1 x\n")

    def test_format_round_trip(self) -> None:
        """Test writing then reading gives the same edges."""
        ring = cycle(5)

        assert parse_gr(format_gr(ring)).same_as(ring)

    def test_format_text(self, path3: Structure) -> None:
        """Test edges are written once, 1-based and sorted."""
        assert format_gr(path3) == "p tw 3 2\n1 2\n2 3\n"


class TestParseTd:
    """Tests for parse_td."""

    def test_reads_bags(self, path3: Structure) -> None:
        """Test bags, tree edges and the declared width."""
        declared, cd = parse_td(PATH_TD)

        assert declared == 1
        assert cd.bags == {0: frozenset({0, 1}), 1: frozenset({1, 2})}
        assert cd.parent == {0: None, 1: 0}
        assert width(encode_classical(path3, cd)) == 1

    def test_rooted_at_least_bag(self) -> None:
        """Test parents point towards bag 1 breadth first."""
        text = "s td 3 2 4\nb 1 1 2\nb 2 2 3\nb 3 3 4\n3 2\n2 1\n"

        _, cd = parse_td(text)

        assert cd.parent == {0: None, 1: 0, 2: 1}

    def test_bag_count_mismatch(self) -> None:
        """Test the declared bag count is checked."""
        with pytest.raises(ParseError, match="header declares 3 bags"):
            parse_td(PATH_TD.replace("s td 2", "s td 3"))

    def test_unknown_bag(self) -> None:
        """Test tree edges must reference declared bags."""
        with pytest.raises(ParseError, match="unknown bag"):
            parse_td("s td 2 2 3\nb 1 1 2\nb 2 2 3\n1 5\n")

    def test_not_a_tree(self) -> None:
        """Test disconnected bags are rejected."""
        with pytest.raises(ParseError, match="do not form a tree"):
            parse_td("s td 2 1 2\nb 1 1\nb 2 2\n")

    def test_format_round_trip(self) -> None:
        """Test writing then reading gives the same bags."""
        cd = ClassicalDecomposition.path([frozenset({0, 1}), frozenset({1, 2}), frozenset({2, 3})])

        declared, loaded = parse_td(format_td(cd, 4))

        assert declared == 1
        assert loaded.bags == cd.bags
        assert loaded.parent == cd.parent


class TestPaceRepository:
    """Tests for PaceRepository."""

    def test_load_files(self, tmp_path: Path) -> None:
        """Test both file kinds load relative to the base."""
        (tmp_path / "p.gr").write_text(PATH_GR)
        (tmp_path / "p.td").write_text(PATH_TD)
        repository = PaceRepository(tmp_path)

        assert repository.load_graph("p.gr").size == 3
        assert repository.load_decomposition("p.td")[0] == 1

    def test_error_names_file(self, tmp_path: Path) -> None:
        """Test parse errors carry the resolved path."""
        (tmp_path / "bad.gr").write_text("p tw 2 1\n1 3\n")

        with pytest.raises(ParseError) as info:
            PaceRepository(tmp_path).load_graph("bad.gr")

        assert info.value.path == str(tmp_path / "bad.gr")
        assert info.value.line == 2

    def test_missing_file(self, tmp_path: Path) -> None:
        """Test unreadable files raise ParseError."""
        with pytest.raises(ParseError, match="cannot read file"):
            PaceRepository(tmp_path).load_graph("absent.gr")
