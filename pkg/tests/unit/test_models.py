"""Tests for domain models."""

from __future__ import annotations

import pytest
from pydantic import ValidationError

from span_decomp.models import (
    NO_MARK,
    SIGMA,
    Annotation,
    ClassicalDecomposition,
    InequalityCheck,
    InodeCensus,
    KBag,
    OverlapProfile,
    RefuteReport,
    RelationSymbol,
    Role,
    SearchConfig,
    Structure,
    TreeDecomposition,
    Vocabulary,
)
from span_decomp.models.plans import Bounds
from span_decomp.models.reports import ComponentCount, OverlapPair, PairResult
from span_decomp.services.structures import colored_point, cycle, disjoint_union, from_edges, relabel

# =============================================================================
# STRUCTURES
# =============================================================================


class TestRelationSymbol:
    """Tests for RelationSymbol model."""

    def test_symmetric_binary(self) -> None:
        """Test a binary relation may be symmetric."""
        assert RelationSymbol(name="E", arity=2, symmetric=True).symmetric

    def test_symmetric_requires_binary(self) -> None:
        """Test a ternary relation cannot be symmetric."""
        with pytest.raises(ValidationError, match="must be binary"):
            RelationSymbol(name="R", arity=3, symmetric=True)

    def test_arity_positive(self) -> None:
        """Test constants are not relations."""
        with pytest.raises(ValidationError):
            RelationSymbol(name="c", arity=0)


class TestVocabulary:
    """Tests for Vocabulary model."""

    def test_duplicate_names_rejected(self) -> None:
        """Test relation names are unique."""
        with pytest.raises(ValidationError, match="duplicate"):
            Vocabulary(relations=(RelationSymbol(name="E", arity=2), RelationSymbol(name="E", arity=2)))

    def test_union_keeps_first_declaration(self) -> None:
        """Test union merges by name."""
        extra = Vocabulary(relations=(RelationSymbol(name="E", arity=2), RelationSymbol(name="LT", arity=2)))

        merged = SIGMA.union(extra)

        assert merged.names == ("E", "P0", "P1", "LT")
        assert merged.by_name["E"].symmetric

    def test_union_rejects_arity_clash(self) -> None:
        """Test a shared name must keep its arity."""
        with pytest.raises(ValueError, match="arity"):
            SIGMA.union(Vocabulary(relations=(RelationSymbol(name="E", arity=3),)))


class TestStructure:
    """Tests for Structure model."""

    def test_symmetric_tuples_normalized(self) -> None:
        """Test symmetric tuples are stored sorted."""
        structure = Structure(size=2, relations={"E": frozenset({(1, 0)})})

        assert structure.tuples("E") == {(0, 1)}
        assert structure.holds("E", (1, 0))
        assert structure.holds("E", (0, 1))

    def test_directed_tuples_kept(self) -> None:
        """Test non-symmetric relations keep orientation."""
        structure = Structure(size=2, relations={"E": frozenset({(1, 0)})}, symmetric_edges=False)

        assert not structure.holds("E", (0, 1))

    def test_unknown_relation_rejected(self) -> None:
        """Test relations must be in the vocabulary."""
        with pytest.raises(ValidationError, match="not in the vocabulary"):
            Structure(size=1, relations={"Q": frozenset({(0,)})})

    def test_wrong_arity_rejected(self) -> None:
        """Test tuple length must match arity."""
        with pytest.raises(ValidationError, match="arity"):
            Structure(size=2, relations={"E": frozenset({(0,)})})

    def test_unknown_element_rejected(self) -> None:
        """Test tuples reference existing ids."""
        with pytest.raises(ValidationError, match="unknown element"):
            Structure(size=2, relations={"E": frozenset({(0, 2)})})

    def test_colors_exclusive(self) -> None:
        """Test no element is both P0 and P1."""
        with pytest.raises(ValidationError, match="both P0 and P1"):
            Structure(size=1, relations={"P0": frozenset({(0,)}), "P1": frozenset({(0,)})})

    def test_annotation_for_unknown_element(self) -> None:
        """Test annotations reference existing ids."""
        with pytest.raises(ValidationError, match="annotation"):
            Structure(size=1, annotations={3: Annotation()})

    def test_colors_and_annotations(self) -> None:
        """Test color and annotation lookups."""
        structure = colored_point("P1")

        assert structure.color_of(0) == "P1"
        assert structure.colors(0) == {"P1"}
        assert structure.annotation(0).role is Role.PLAIN

    def test_gaifman_and_incidence(self) -> None:
        """Test derived graph views."""
        structure = from_edges(3, [(0, 1)])

        assert set(structure.gaifman.edges) == {(0, 1)}
        assert structure.neighbors(0) == {1}
        assert ("E", (1, 0)) in structure.incidence[0]
        assert 2 not in structure.incidence

    def test_same_as_ignores_annotations(self) -> None:
        """Test same_as compares tuples only."""
        plain = from_edges(2, [(0, 1)])
        annotated = plain.model_copy(update={"annotations": {0: Annotation(role=Role.SOURCE_S)}})

        assert plain.same_as(annotated)
        assert not plain.same_as(from_edges(2, []))

    def test_annotation_compact(self) -> None:
        """Test compact dumps only set fields, with aliases."""
        annotation = Annotation(role=Role.LOZ_LEAF, copy_index=2, pair=0)

        assert annotation.compact() == {"role": "loz-leaf", "copy": 2, "pair": 0}

    def test_annotation_word_pattern(self) -> None:
        """Test words are bit strings."""
        with pytest.raises(ValidationError):
            Annotation(word="012")


# =============================================================================
# DECOMPOSITIONS
# =============================================================================


class TestKBag:
    """Tests for KBag model."""

    def test_marks_lookup(self, edge: Structure) -> None:
        """Test mark index lookups."""
        bag = KBag(content=edge, in_marks={0: 1}, out_marks={2: 0})

        assert bag.in_index(1) == 0
        assert bag.in_index(0) == NO_MARK
        assert bag.out_index(0) == 2

    def test_empty_bag_rejected(self) -> None:
        """Test bags are never empty."""
        with pytest.raises(ValidationError, match="never empty"):
            KBag(content=Structure(size=0))

    def test_marks_injective(self, edge: Structure) -> None:
        """Test two indices cannot mark one element."""
        with pytest.raises(ValidationError, match="two out-mark"):
            KBag(content=edge, out_marks={0: 1, 1: 1})

    def test_mark_on_unknown_element(self, edge: Structure) -> None:
        """Test marks point at local elements."""
        with pytest.raises(ValidationError, match="unknown local"):
            KBag(content=edge, in_marks={0: 5})

    def test_origins_length(self, edge: Structure) -> None:
        """Test provenance lists one element per local id."""
        with pytest.raises(ValidationError, match="origins"):
            KBag(content=edge, origins=(4,))

    def test_class_invariant_under_relabelling(self, edge: Structure) -> None:
        """Test isomorphic bags share a class."""
        left = KBag(content=edge, out_marks={0: 1})
        right = KBag(content=edge, out_marks={0: 0}, origins=(7, 8))

        assert left.bag_class == right.bag_class
        assert left.bag_class.digest == right.bag_class.digest

    def test_class_distinguishes_marks_and_colors(self, edge: Structure) -> None:
        """Test mark indices and colors are part of the class."""
        plain = KBag(content=edge, out_marks={0: 0})

        assert plain.bag_class != KBag(content=edge, out_marks={1: 0}).bag_class
        assert plain.bag_class != KBag(content=edge, in_marks={0: 0}).bag_class
        colored = from_edges(2, [(0, 1)], colors={0: "P0"})
        assert plain.bag_class != KBag(content=colored, out_marks={0: 0}).bag_class

    def test_wide_cycle_bag_is_canonical(self) -> None:
        """Test a nine-element cycle bag gets one class under any relabelling."""
        ring = cycle(9)
        shuffled = relabel(ring, {x: (4 * x) % 9 for x in ring.elements})

        assert KBag(content=ring).bag_class == KBag(content=shuffled).bag_class
        assert KBag(content=ring, out_marks={0: 0}).bag_class == KBag(content=shuffled, out_marks={0: 0}).bag_class
        assert KBag(content=ring, out_marks={0: 0}).bag_class != KBag(content=ring, out_marks={0: 0, 1: 3}).bag_class

    def test_regular_bags_are_told_apart(self) -> None:
        """Test a 9-cycle and a 4-cycle beside a 5-cycle get different classes."""
        two_rings = disjoint_union(cycle(4), cycle(5))

        assert KBag(content=cycle(9)).bag_class != KBag(content=two_rings).bag_class

    def test_edgeless_bag(self) -> None:
        """Test ten interchangeable elements canonicalize without a blow-up."""
        scattered = from_edges(10, [])
        mirrored = relabel(scattered, {x: 9 - x for x in range(10)})

        assert KBag(content=scattered).bag_class == KBag(content=mirrored).bag_class


class TestTreeDecomposition:
    """Tests for TreeDecomposition model."""

    def test_tree_views(self, edge_bag: KBag) -> None:
        """Test children, roots and distances."""
        td = TreeDecomposition(k=1, parent={0: None, 1: 0, 2: 0}, bags={0: edge_bag, 1: edge_bag, 2: edge_bag})

        assert td.nodes == [0, 1, 2]
        assert td.children == {0: [1, 2], 1: [], 2: []}
        assert td.root == 0
        assert td.distances_from(1)[2] == 2
        assert td.distances_to_set({1, 2}) == {0: 1, 1: 0, 2: 0}

    def test_long_path_distances_without_a_table(self, edge_bag: KBag) -> None:
        """Test distances on a long path come from single searches, with no all-pairs table."""
        n = 3000
        td = TreeDecomposition(
            k=1,
            parent={0: None, **{t: t - 1 for t in range(1, n)}},
            bags=dict.fromkeys(range(n), edge_bag),
        )

        assert td.distances_from(0)[n - 1] == n - 1
        assert td.distances_to_set({0, n - 1})[n // 2] == n // 2 - 1
        assert not hasattr(td, "distances")

    def test_nodes_must_match(self, edge_bag: KBag) -> None:
        """Test parent and bags cover the same nodes."""
        with pytest.raises(ValidationError, match="same nodes"):
            TreeDecomposition(k=1, parent={0: None, 1: 0}, bags={0: edge_bag})

    def test_at_least_one_node(self) -> None:
        """Test the empty decomposition is rejected."""
        with pytest.raises(ValidationError, match="at least one node"):
            TreeDecomposition(k=0, parent={}, bags={})


class TestClassicalDecomposition:
    """Tests for ClassicalDecomposition model."""

    def test_path(self) -> None:
        """Test path decompositions are rooted at the first bag."""
        cd = ClassicalDecomposition.path([frozenset({0}), frozenset({0, 1}), frozenset({1})])

        assert cd.parent == {0: None, 1: 0, 2: 1}
        assert cd.width == 1

    def test_nodes_must_match(self) -> None:
        """Test parent and bags cover the same nodes."""
        with pytest.raises(ValidationError):
            ClassicalDecomposition(parent={0: None}, bags={1: frozenset({0})})


# =============================================================================
# PLANS AND REPORTS
# =============================================================================


class TestInequalityCheck:
    """Tests for InequalityCheck model."""

    @pytest.mark.parametrize(
        ("lhs", "relation", "rhs", "holds"),
        [(2, ">", 1, True), (1, ">", 1, False), (1, ">=", 1, True), (1, "<", 1, False), (3, "==", 3, True)],
    )
    def test_evaluate(self, lhs: int, relation: str, rhs: int, holds: bool) -> None:
        """Test each relation."""
        assert InequalityCheck.evaluate("x", lhs, relation, rhs).holds is holds

    def test_large_values_serialized_as_strings(self) -> None:
        """Test integers beyond double precision survive JSON."""
        check = InequalityCheck.evaluate("big", 2**60, ">", 1)

        dumped = check.model_dump(mode="json")

        assert dumped["lhs"] == str(2**60)
        assert dumped["rhs"] == 1

    def test_unknown_relation(self) -> None:
        """Test only the four relations are accepted."""
        with pytest.raises(ValidationError):
            InequalityCheck(name="x", lhs=1, relation="!=", rhs=2, holds=True)


class TestBounds:
    """Tests for Bounds model."""

    def test_portable_fields(self) -> None:
        """Test every size expression is portable."""
        bounds = Bounds(
            cover_size=2**70,
            bicolit_fresh_nodes=1,
            gadget_size=1,
            bicolit_size=1,
            length_bound=1,
            decomposition_length=1,
            h_size=1,
            bicolit_diameter=1,
            h=0,
            N=1,
            d=1,
            d_loose=1,
            domino_width=1,
        )

        assert bounds.model_dump(mode="json")["cover_size"] == str(2**70)


class TestReports:
    """Tests for falsifier report models."""

    def test_search_config_bounds(self) -> None:
        """Test configuration validation."""
        assert SearchConfig(k=1, delta=1).max_tree_nodes == 6
        with pytest.raises(ValidationError):
            SearchConfig(k=-1, delta=1)
        with pytest.raises(ValidationError):
            SearchConfig(k=1, delta=1, workers=0)

    def test_overlap_profile_flagged(self) -> None:
        """Test flagged pairs are filtered."""
        pairs = [
            OverlapPair(block=0, index=0, left=0, right=3, min_distance=1, flagged=False),
            OverlapPair(block=0, index=1, left=3, right=6, min_distance=9, flagged=True),
        ]

        assert OverlapProfile(threshold=4, pairs=pairs).flagged == pairs[1:]

    def test_census_counts(self) -> None:
        """Test census counts follow component order."""
        census = InodeCensus(
            node=0,
            components=[
                ComponentCount(neighbor=1, nodes=frozenset({1}), exclusive=[4, 5]),
                ComponentCount(neighbor=2, nodes=frozenset({2}), exclusive=[]),
            ],
            in_bag=[0],
        )

        assert census.counts == [2, 0]

    def test_refute_report_exhaustive(self) -> None:
        """Test exhaustiveness needs complete searches and no inconclusive pair."""
        report = RefuteReport(
            alpha=1,
            k=1,
            delta=1,
            g_forms=[],
            h_forms=[],
            g_complete=True,
            h_complete=True,
            pairs_checked=0,
            similar_pairs=[],
            inconclusive_pairs=[],
        )

        assert report.exhaustive
        assert not report.model_copy(update={"h_complete": False}).exhaustive
        assert not report.model_copy(update={"inconclusive_pairs": [PairResult(g_index=0, h_index=0)]}).exhaustive
