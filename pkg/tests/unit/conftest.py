"""Pytest fixtures for unit tests.

Unit tests work on structures small enough to check by hand.
"""

from __future__ import annotations

import pytest

from span_decomp.models.decomposition import ClassicalDecomposition, KBag, TreeDecomposition
from span_decomp.models.structure import Structure
from span_decomp.services.decompositions import encode_classical
from span_decomp.services.structures import from_edges, undirected_path

# =============================================================================
# SAMPLE STRUCTURES
# =============================================================================


@pytest.fixture
def edge() -> Structure:
    """Two adjacent uncoloured elements."""
    return from_edges(2, [(0, 1)])


@pytest.fixture
def path3() -> Structure:
    """Path 0 - 1 - 2."""
    return undirected_path(3)


@pytest.fixture
def path5() -> Structure:
    """Path 0 - 1 - 2 - 3 - 4."""
    return undirected_path(5)


@pytest.fixture
def triangle() -> Structure:
    """Three pairwise adjacent elements."""
    return from_edges(3, [(0, 1), (1, 2), (0, 2)])


@pytest.fixture
def star3() -> Structure:
    """Center 1 with leaves 0, 2 and 3."""
    return from_edges(4, [(0, 1), (1, 2), (1, 3)])


@pytest.fixture
def star6() -> Structure:
    """Center 0 with six leaves 1..6."""
    return from_edges(7, [(0, i) for i in range(1, 7)])


# =============================================================================
# SAMPLE DECOMPOSITIONS
# =============================================================================


@pytest.fixture
def triangle_td(triangle: Structure) -> TreeDecomposition:
    """The triangle in one bag."""
    return encode_classical(triangle, ClassicalDecomposition.path([frozenset({0, 1, 2})]))


@pytest.fixture
def path3_td(path3: Structure) -> TreeDecomposition:
    """Bags {0, 1} and {1, 2}."""
    return encode_classical(path3, ClassicalDecomposition.path([frozenset({0, 1}), frozenset({1, 2})]))


@pytest.fixture
def path5_td(path5: Structure) -> TreeDecomposition:
    """One bag per edge, in path order."""
    return encode_classical(path5, ClassicalDecomposition.path([frozenset({i, i + 1}) for i in range(4)]))


@pytest.fixture
def star3_td(star3: Structure) -> TreeDecomposition:
    """Element 1 carried through three bags."""
    return encode_classical(
        star3,
        ClassicalDecomposition.path([frozenset({0, 1}), frozenset({1, 2}), frozenset({1, 3})]),
    )


@pytest.fixture
def star6_td(star6: Structure) -> TreeDecomposition:
    """Root bag {0} with one child bag per leaf."""
    return encode_classical(
        star6,
        ClassicalDecomposition(
            parent={0: None, **{i: 0 for i in range(1, 7)}},
            bags={0: frozenset({0}), **{i: frozenset({0, i}) for i in range(1, 7)}},
        ),
        k=1,
    )


@pytest.fixture
def edge_bag(edge: Structure) -> KBag:
    """An unmarked edge bag."""
    return KBag(content=edge)
