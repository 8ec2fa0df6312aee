"""Unit tests for exhaustive decomposition enumeration."""

from __future__ import annotations

from typing import TYPE_CHECKING

from span_decomp.models.decomposition import ClassicalDecomposition
from span_decomp.models.reports import SearchConfig
from span_decomp.services.decompositions import (
    encode_classical,
    ext,
    is_path_decomposition,
    is_valid,
    span,
    validate_td,
    width,
)
from span_decomp.services.enumeration import canonical_form, enumerate_decompositions, root_bags
from span_decomp.services.isomorphism import are_isomorphic
from span_decomp.services.structures import colored_point, empty_structure, from_edges, relabel

if TYPE_CHECKING:
    from span_decomp.models.decomposition import TreeDecomposition
    from span_decomp.models.structure import Structure


class TestCanonicalForm:
    """Tests for canonical_form."""

    def test_single_bag(self, triangle_td: TreeDecomposition) -> None:
        """Test one bag gives one parenthesised digest."""
        form = canonical_form(triangle_td)

        assert form == f"({triangle_td.bags[0].bag_class.digest})"

    def test_children_order_does_not_matter(self, star6_td: TreeDecomposition) -> None:
        """Test swapping node ids keeps the form."""
        swapped = star6_td.model_copy(
            update={
                "bags": {t: star6_td.bags[7 - t if t else 0] for t in star6_td.bags},
            }
        )

        assert canonical_form(swapped) == canonical_form(star6_td)

    def test_depends_on_shape(self, path3_td: TreeDecomposition, star3_td: TreeDecomposition) -> None:
        """Test different trees give different forms."""
        assert canonical_form(path3_td) != canonical_form(star3_td)


class TestRootBags:
    """Tests for root_bags."""

    def test_counts(self, path3: Structure) -> None:
        """Test all non-empty subsets up to k + 1 elements."""
        assert len(root_bags(path3, 1)) == 6
        assert root_bags(path3, 0) == [(0,), (1,), (2,)]


class TestEnumerate:
    """Tests for enumerate_decompositions."""

    def test_single_point(self) -> None:
        """Test one element has exactly one decomposition at width 0."""
        outcome = enumerate_decompositions(colored_point("P0"), SearchConfig(k=0, delta=0))

        assert len(outcome.decompositions) == 1
        assert outcome.complete

    def test_edge_needs_width_one(self, edge: Structure) -> None:
        """Test an edge has no width-0 decomposition."""
        outcome = enumerate_decompositions(edge, SearchConfig(k=0, delta=3))

        assert outcome.decompositions == []
        assert outcome.complete

    def test_edge_at_span_zero(self, edge: Structure) -> None:
        """Test span 0 leaves only the single bag."""
        outcome = enumerate_decompositions(edge, SearchConfig(k=1, delta=0))

        assert len(outcome.decompositions) == 1
        assert len(outcome.decompositions[0].nodes) == 1

    def test_empty_structure(self) -> None:
        """Test nothing to decompose gives a complete empty outcome."""
        outcome = enumerate_decompositions(empty_structure(), SearchConfig(k=1, delta=1))

        assert outcome.decompositions == []
        assert outcome.complete
        assert outcome.explored == 0

    def test_results_meet_bounds(self, path3: Structure) -> None:
        """Test every result is a valid path of bounded width and span."""
        outcome = enumerate_decompositions(path3, SearchConfig(k=1, delta=1, path_only=True))

        assert outcome.decompositions
        assert outcome.complete
        for td in outcome.decompositions:
            rebuilt, _ = ext(td)
            assert is_valid(td)
            assert is_path_decomposition(td)
            assert width(td) <= 1
            assert span(td) <= 1
            assert are_isomorphic(rebuilt, path3)

    def test_forms_are_sorted_and_unique(self, star3: Structure) -> None:
        """Test output is deduplicated and in canonical order."""
        outcome = enumerate_decompositions(star3, SearchConfig(k=1, delta=2, max_tree_nodes=4))

        assert outcome.canonical_forms == sorted(set(outcome.canonical_forms))
        assert [canonical_form(td) for td in outcome.decompositions] == outcome.canonical_forms

    def test_isomorphic_inputs_agree(self, path3: Structure) -> None:
        """Test relabelling the structure keeps the canonical forms."""
        config = SearchConfig(k=1, delta=1)

        first = enumerate_decompositions(path3, config)
        second = enumerate_decompositions(relabel(path3, {0: 2, 1: 1, 2: 0}), config)

        assert first.canonical_forms == second.canonical_forms

    def test_span_bound_prunes(self, path5: Structure) -> None:
        """Test a smaller span bound never finds more."""
        loose = enumerate_decompositions(path5, SearchConfig(k=1, delta=2, path_only=True, max_tree_nodes=5))
        tight = enumerate_decompositions(path5, SearchConfig(k=1, delta=1, path_only=True, max_tree_nodes=5))

        assert set(tight.canonical_forms) <= set(loose.canonical_forms)
        assert all(span(td) <= 1 for td in tight.decompositions)

    def test_budget_marks_incomplete(self, path3: Structure) -> None:
        """Test running out of budget is reported, not hidden."""
        outcome = enumerate_decompositions(path3, SearchConfig(k=1, delta=1, budget_nodes=1))

        assert not outcome.complete

    def test_workers_do_not_change_output(self, path3: Structure) -> None:
        """Test one and four workers give identical results."""
        config = SearchConfig(k=1, delta=2, max_tree_nodes=4)

        single = enumerate_decompositions(path3, config.model_copy(update={"workers": 1}))
        pooled = enumerate_decompositions(path3, config.model_copy(update={"workers": 4}))

        assert single.canonical_forms == pooled.canonical_forms
        assert single.explored == pooled.explored
        assert single.complete == pooled.complete


class TestCompleteness:
    """Tests that non-reduced decompositions are reached."""

    def test_point_repeated_in_two_bags(self) -> None:
        """Test a colored point also has the two-node decompositions."""
        outcome = enumerate_decompositions(colored_point("P0"), SearchConfig(k=0, delta=1, max_tree_nodes=2))

        assert outcome.complete
        assert sorted({len(td.nodes) for td in outcome.decompositions}) == [1, 2]
        # color in the root only, in the child only, or in both
        assert len(outcome.decompositions) == 4
        for td in outcome.decompositions:
            rebuilt, _ = ext(td)
            assert is_valid(td)
            assert are_isomorphic(rebuilt, colored_point("P0"))

    def test_nested_bags_are_reached(self, star3: Structure) -> None:
        """Test some result has a child bag inside its parent bag."""
        outcome = enumerate_decompositions(star3, SearchConfig(k=1, delta=2, max_tree_nodes=4))

        nested = [
            td
            for td in outcome.decompositions
            for t, up in td.parent.items()
            if up is not None and set(td.bags[t].origins or ()) <= set(td.bags[up].origins or ())
        ]
        assert nested

    def test_edge_placements(self, edge: Structure) -> None:
        """Test an edge repeated in two bags may sit in either bag or both."""
        outcome = enumerate_decompositions(edge, SearchConfig(k=1, delta=1, max_tree_nodes=2))

        twice = [
            td
            for td in outcome.decompositions
            if len(td.nodes) == 2 and all(td.bags[t].size == 2 for t in td.nodes)
        ]
        held = sorted(tuple(bool(td.bags[t].content.relations) for t in sorted(td.nodes)) for td in twice)
        assert set(held) == {(True, False), (False, True), (True, True)}

    def test_mark_indices_vary(self) -> None:
        """Test either end of a colored edge may take out-mark index 0."""
        colored = from_edges(2, [(0, 1)], colors={0: "P0"})

        outcome = enumerate_decompositions(colored, SearchConfig(k=1, delta=1, max_tree_nodes=2))

        roots = [td.bags[td.root] for td in outcome.decompositions if len(td.nodes) == 2]
        marked = {bag.origins[bag.out_marks[0]] for bag in roots if bag.origins and len(bag.out_marks) == 2}
        assert marked == {0, 1}

    def test_contains_classical_encoding(self, path3: Structure) -> None:
        """Test the reduced induced encoding of a classical decomposition is among the results."""
        classical = ClassicalDecomposition(
            parent={0: None, 1: 0},
            bags={0: frozenset({0, 1}), 1: frozenset({1, 2})},
        )
        expected = canonical_form(encode_classical(path3, classical, k=1))

        outcome = enumerate_decompositions(path3, SearchConfig(k=1, delta=1))

        assert expected in outcome.canonical_forms

    def test_every_result_rebuilds_structure(self, star3: Structure) -> None:
        """Test every result is valid, bounded and rebuilds the structure."""
        outcome = enumerate_decompositions(star3, SearchConfig(k=1, delta=2, max_tree_nodes=4))

        assert outcome.decompositions
        for td in outcome.decompositions:
            rebuilt, _ = ext(td)
            assert validate_td(td) == []
            assert width(td) <= 1
            assert span(td) <= 2
            assert len(td.nodes) <= 4
            assert are_isomorphic(rebuilt, star3)
