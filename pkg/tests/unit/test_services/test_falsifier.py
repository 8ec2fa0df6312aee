"""Unit tests for the falsifier checks."""

from __future__ import annotations

from typing import TYPE_CHECKING

import pytest

from span_decomp.exceptions import AnnotationError, DomainError, ImpossibleCensusError, PreconditionError
from span_decomp.models.decomposition import ClassicalDecomposition
from span_decomp.models.reports import SearchConfig
from span_decomp.services.decompositions import decomposition_structure, encode_classical
from span_decomp.services.ef_engine import ef_equivalent
from span_decomp.services.enumeration import enumerate_decompositions
from span_decomp.services.falsifier import (
    algorithm1_walk,
    bridge_count,
    check_lemma1,
    check_supp,
    inode_census,
    large_component,
    micro_refute,
    minimal_connecting_subtree,
    overlap_profile,
    trim_to_bounded_degree,
    walk_large_neighbors,
)
from span_decomp.services.gadgets import make_bicol
from span_decomp.services.structures import colored_point
from span_decomp.services.witnesses import canonical_pd_pw

if TYPE_CHECKING:
    from span_decomp.models.decomposition import TreeDecomposition
    from span_decomp.models.structure import Structure


# =============================================================================
# BAG-LEVEL CHECKS
# =============================================================================


class TestCheckSupp:
    """Tests for check_supp."""

    def test_ladder_mixes_runs(self) -> None:
        """Test the ladder holds both run members in one bag."""
        bicol = make_bicol(0, 1, 1, 0, 1)

        assert check_supp(canonical_pd_pw(bicol), bicol, 1, 0, 1)

    def test_missing_value(self) -> None:
        """Test a value carried by no run is never supported."""
        bicol = make_bicol(0, 1, 1, 0, 0)
        td = canonical_pd_pw(bicol)

        assert not check_supp(td, bicol, 1, 0, 1)
        assert check_supp(td, bicol, 1, 0, 0)

    def test_single_bag(self) -> None:
        """Test one bag holding everything supports any present pair."""
        bicol = make_bicol(0, 1, 1, 0, 1)
        td = encode_classical(bicol, ClassicalDecomposition.path([frozenset(range(4))]))

        assert check_supp(td, bicol, 1, 0, 1)

    def test_value_out_of_range(self) -> None:
        """Test run values above n raise."""
        bicol = make_bicol(0, 1, 1, 0, 1)

        with pytest.raises(DomainError):
            check_supp(canonical_pd_pw(bicol), bicol, 1, 0, 2)

    def test_needs_run_annotations(self, path3: Structure, path3_td: TreeDecomposition) -> None:
        """Test plain structures are refused."""
        with pytest.raises(AnnotationError):
            check_supp(path3_td, path3, 1, 0, 1)


class TestCheckLemma1:
    """Tests for check_lemma1."""

    def test_path(self, path5: Structure, path5_td: TreeDecomposition) -> None:
        """Test distances transfer on a path of edge bags."""
        assert check_lemma1(path5, path5_td, 1).ok

    def test_star(self, star6: Structure, star6_td: TreeDecomposition) -> None:
        """Test a branching decomposition at its own span."""
        assert check_lemma1(star6, star6_td, 2).ok

    def test_span_above_delta(self, path5: Structure, path5_td: TreeDecomposition) -> None:
        """Test the span precondition is enforced."""
        with pytest.raises(PreconditionError):
            check_lemma1(path5, path5_td, 0)


class TestOverlapProfile:
    """Tests for overlap_profile."""

    def test_ladder_keeps_junctions_close(self) -> None:
        """Test the canonical ladder is never flagged."""
        bicol = make_bicol(0, 1, 1, 0, 1)

        profile = overlap_profile(canonical_pd_pw(bicol), bicol, 1, 0)

        assert profile.threshold == 4
        assert [(p.left, p.right) for p in profile.pairs] == [(0, 3)]
        assert profile.flagged == []

    def test_stretched_decomposition_is_flagged(self) -> None:
        """Test junctions five bags apart exceed 2 * delta * (2^beta + 1)."""
        bicol = make_bicol(0, 1, 1, 0, 1)
        bags = [frozenset({0, 1, 2}), *[frozenset({1, 2})] * 4, frozenset({1, 2, 3})]
        td = encode_classical(bicol, ClassicalDecomposition.path(bags))

        profile = overlap_profile(td, bicol, 1, 0)

        assert profile.pairs[0].min_distance == 5
        assert len(profile.flagged) == 1

    def test_needs_junctions(self, path3: Structure, path3_td: TreeDecomposition) -> None:
        """Test plain structures are refused."""
        with pytest.raises(AnnotationError):
            overlap_profile(path3_td, path3, 1, 0)


# =============================================================================
# SUBTREE SURGERY
# =============================================================================


class TestMinimalConnectingSubtree:
    """Tests for minimal_connecting_subtree."""

    def test_single_holder(self, path5_td: TreeDecomposition) -> None:
        """Test an element in one bag gives that node."""
        assert minimal_connecting_subtree(path5_td, [0]) == frozenset({0})

    def test_spans_between_holders(self, path5_td: TreeDecomposition) -> None:
        """Test the path between two holders is kept."""
        assert minimal_connecting_subtree(path5_td, [0, 4]) == frozenset({0, 1, 2, 3})

    def test_with_structure(self, path5: Structure, path5_td: TreeDecomposition) -> None:
        """Test placement through the structure gives the same answer."""
        assert minimal_connecting_subtree(path5_td, [2], structure=path5) == frozenset({1, 2})

    def test_nothing_marked(self, path5_td: TreeDecomposition) -> None:
        """Test an empty mark set raises."""
        with pytest.raises(PreconditionError):
            minimal_connecting_subtree(path5_td, [])

    def test_unknown_element(self, path5_td: TreeDecomposition) -> None:
        """Test a mark held by no bag raises."""
        with pytest.raises(DomainError, match="occurs in no bag"):
            minimal_connecting_subtree(path5_td, [9])


class TestTrim:
    """Tests for trim_to_bounded_degree."""

    def test_drops_unmarked_branches(self, star6_td: TreeDecomposition) -> None:
        """Test branches holding no missing mark are cut."""
        result = trim_to_bounded_degree(star6_td.nodes, star6_td, None, [1, 2], 1)

        assert result.nodes == frozenset({0, 1, 2})
        assert result.findings == []

    def test_marks_in_the_root_bag(self, star6_td: TreeDecomposition) -> None:
        """Test branches adding nothing to the root bag are cut."""
        result = trim_to_bounded_degree(star6_td.nodes, star6_td, None, [0], 1)

        assert result.nodes == frozenset({0})

    def test_stuck_node(self, star6_td: TreeDecomposition) -> None:
        """Test a node that must keep every branch is reported."""
        result = trim_to_bounded_degree(star6_td.nodes, star6_td, None, range(1, 7), 1)

        assert result.nodes == frozenset(range(7))
        assert [(f.kind, f.node) for f in result.findings] == [("degree", 0)]

    def test_low_degree_untouched(self, path5_td: TreeDecomposition) -> None:
        """Test subtrees within the limit are returned as given."""
        result = trim_to_bounded_degree({0, 1, 2}, path5_td, None, [0], 0)

        assert result.nodes == frozenset({0, 1, 2})


# =============================================================================
# CENSUS AND WALK
# =============================================================================


class TestInodeCensus:
    """Tests for inode_census."""

    def test_at_an_end(self, path5_td: TreeDecomposition) -> None:
        """Test the only component holds every mark outside the bag."""
        census = inode_census(path5_td.nodes, path5_td, 0, range(5))

        assert census.in_bag == [0, 1]
        assert [c.exclusive for c in census.components] == [[2, 3, 4]]
        assert census.components[0].neighbor == 1

    def test_in_the_middle(self, path5_td: TreeDecomposition) -> None:
        """Test components are ordered by their neighbour."""
        census = inode_census(path5_td.nodes, path5_td, 1, range(5))

        assert census.counts == [1, 2]
        assert census.in_bag == [1, 2]
        assert [c.neighbor for c in census.components] == [0, 2]

    def test_node_outside_subtree(self, path5_td: TreeDecomposition) -> None:
        """Test t must belong to the subtree."""
        with pytest.raises(DomainError):
            inode_census({0, 1}, path5_td, 3, range(5))

    def test_bridge_count(self, path5_td: TreeDecomposition) -> None:
        """Test pairs across two components are counted once."""
        census = inode_census(path5_td.nodes, path5_td, 1, range(5))

        assert bridge_count(census, [(0, 3), (3, 0), (4, 3)], 1) == 1
        assert bridge_count(census, [(1, 2)], 0) == 0


class TestLargeComponent:
    """Tests for large_component."""

    def test_one_large(self) -> None:
        """Test the component above total - (k + 1) - N is chosen."""
        verdict = large_component([100, 3, 2], 10, 110, 1)

        assert verdict.component == 0
        assert verdict.threshold == 98
        assert verdict.findings == []

    def test_forbidden_band(self) -> None:
        """Test counts in [N, threshold] are reported."""
        verdict = large_component([50, 55], 10, 110, 1)

        assert verdict.component is None
        assert [f.kind for f in verdict.findings] == ["forbidden-band", "forbidden-band"]

    def test_no_components(self) -> None:
        """Test an isolated node has no large component."""
        assert large_component([], 10, 110, 1).component is None

    def test_two_large(self) -> None:
        """Test two components above the threshold is impossible."""
        with pytest.raises(ImpossibleCensusError):
            large_component([100, 99], 10, 110, 1)

    def test_from_census(self, path5_td: TreeDecomposition) -> None:
        """Test a census is accepted in place of counts."""
        census = inode_census(path5_td.nodes, path5_td, 0, range(5))

        assert large_component(census, 1, 5, 1).component == 0


class TestWalk:
    """Tests for walk_large_neighbors and algorithm1_walk."""

    def test_backtrack(self) -> None:
        """Test the walk stops on t1, t2, t1."""
        trace = walk_large_neighbors(1, {1: 2, 2: 1}.get, 10)

        assert trace.steps == [1, 2, 1]
        assert trace.backtrack_at == 2
        assert trace.findings == []

    def test_halt(self) -> None:
        """Test a node without large component halts the walk."""
        trace = walk_large_neighbors(5, lambda _: None, 10)

        assert trace.steps == [5]
        assert [(f.kind, f.node) for f in trace.findings] == [("halt", 5)]

    def test_step_budget(self) -> None:
        """Test a cycle of pointers runs out of steps."""
        trace = walk_large_neighbors(0, {0: 1, 1: 2, 2: 0}.get, 4)

        assert trace.backtrack_at is None
        assert trace.findings[-1].kind == "budget"
        assert len(trace.steps) == 5

    def test_walk_on_decomposition(self, path3_td: TreeDecomposition) -> None:
        """Test the walk bounces between the two bags of a path."""
        trace = algorithm1_walk(path3_td.nodes, path3_td, None, [0, 1, 2], 1, 1, 10)

        assert trace.steps == [0, 1, 0]
        assert trace.backtrack_at == 2

    def test_walk_halts_at_the_far_end(self, path5_td: TreeDecomposition) -> None:
        """Test the walk follows the single mark and halts on its bag."""
        trace = algorithm1_walk(path5_td.nodes, path5_td, None, [4], 0, 0, 10)

        assert trace.steps == [0, 1, 2, 3]
        assert trace.findings[-1].kind == "halt"
        assert any(f.kind == "forbidden-band" for f in trace.findings)

    def test_empty_subtree(self, path3_td: TreeDecomposition) -> None:
        """Test an empty subtree raises."""
        with pytest.raises(PreconditionError):
            algorithm1_walk([], path3_td, None, [0], 1, 1, 10)


# =============================================================================
# EXHAUSTIVE REFUTATION
# =============================================================================


class TestMicroRefute:
    """Tests for micro_refute."""

    def test_identical_structures(self, path3: Structure) -> None:
        """Test every decomposition is similar to its twin."""
        report = micro_refute(path3, path3, SearchConfig(k=1, delta=1, max_tree_nodes=3), 2, seed=7)

        assert report.exhaustive
        assert report.g_forms == report.h_forms
        assert report.seed == 7
        pairs = {(p.g_index, p.h_index) for p in report.similar_pairs}
        assert all((i, i) in pairs for i in range(len(report.g_forms)))

    def test_alpha_separates_colors(self) -> None:
        """Test differently colored points agree at rank 0 only."""
        config = SearchConfig(k=0, delta=0)

        blind = micro_refute(colored_point("P0"), colored_point("P1"), config, 0)
        sharp = micro_refute(colored_point("P0"), colored_point("P1"), config, 1)

        assert blind.pairs_checked == 1
        assert len(blind.similar_pairs) == 1
        assert sharp.similar_pairs == []

    def test_inconclusive_pairs(self, path3: Structure, star3: Structure) -> None:
        """Test a game out of budget is listed, never counted as a verdict."""
        report = micro_refute(path3, star3, SearchConfig(k=1, delta=2, max_tree_nodes=3), 3, ef_budget_nodes=1)

        assert report.inconclusive_pairs
        assert not report.exhaustive
        assert all(p.similar is None for p in report.inconclusive_pairs)

    def test_classes_match_pairwise_games(self, path3: Structure, star3: Structure) -> None:
        """Test grouping views into classes finds exactly the pairs a game per pair finds."""
        config = SearchConfig(k=1, delta=2, max_tree_nodes=3)

        report = micro_refute(path3, star3, config, 1)

        views_g = [decomposition_structure(td) for td in enumerate_decompositions(path3, config).decompositions]
        views_h = [decomposition_structure(td) for td in enumerate_decompositions(star3, config).decompositions]
        expected = [
            (i, j)
            for i, view_g in enumerate(views_g)
            for j, view_h in enumerate(views_h)
            if ef_equivalent(view_g, view_h, 1)
        ]
        assert report.exhaustive
        assert [(p.g_index, p.h_index) for p in report.similar_pairs] == expected
