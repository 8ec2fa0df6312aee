"""Search configuration and falsifier report models."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from span_decomp.models.decomposition import TreeDecomposition  # noqa: TC001


class SearchConfig(BaseModel):
    """Bounds of an exhaustive decomposition search."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=0, description="width bound")
    delta: int = Field(..., ge=0, description="span bound")
    path_only: bool = Field(default=False)
    max_tree_nodes: int = Field(default=6, gt=0)
    budget_nodes: int | None = Field(default=None, gt=0, description="search nodes per root partition")
    budget_seconds: float | None = Field(default=None, gt=0)
    workers: int = Field(default=1, gt=0)


class SearchOutcome(BaseModel):
    """Decompositions found, in canonical order."""

    model_config = ConfigDict(frozen=True)

    decompositions: list[TreeDecomposition]
    canonical_forms: list[str]
    complete: bool
    explored: int = Field(..., ge=0)


class Finding(BaseModel):
    """Observation contradicting an expected counting property."""

    model_config = ConfigDict(frozen=True)

    kind: str
    node: int | None = Field(default=None)
    detail: str = Field(default="")


class Lemma1Report(BaseModel):
    """Outcome of the distance-transfer check."""

    model_config = ConfigDict(frozen=True)

    ok: bool
    x: int | None = Field(default=None)
    y: int | None = Field(default=None)
    distance: int | None = Field(default=None)
    bag_distance: int | None = Field(default=None)
    bound: int | None = Field(default=None)


class OverlapPair(BaseModel):
    """Least bag distance between two consecutive junctions."""

    model_config = ConfigDict(frozen=True)

    block: int
    index: int
    left: int
    right: int
    min_distance: int
    flagged: bool


class OverlapProfile(BaseModel):
    """Bag distances of all consecutive junction pairs."""

    model_config = ConfigDict(frozen=True)

    threshold: int
    pairs: list[OverlapPair]

    @property
    def flagged(self) -> list[OverlapPair]:
        """Pairs beyond the threshold."""
        return [p for p in self.pairs if p.flagged]


class TrimResult(BaseModel):
    """Subtree after degree trimming."""

    model_config = ConfigDict(frozen=True)

    nodes: frozenset[int]
    findings: list[Finding] = Field(default_factory=list)


class ComponentCount(BaseModel):
    """Marks held exclusively by one component of the subtree minus a node."""

    model_config = ConfigDict(frozen=True)

    neighbor: int
    nodes: frozenset[int]
    exclusive: list[int]

    @property
    def count(self) -> int:
        """Number of exclusive marks."""
        return len(self.exclusive)


class InodeCensus(BaseModel):
    """Exclusive mark counts around one node."""

    model_config = ConfigDict(frozen=True)

    node: int
    components: list[ComponentCount]
    in_bag: list[int]

    @property
    def counts(self) -> list[int]:
        """Exclusive counts in component order."""
        return [c.count for c in self.components]


class LargeComponent(BaseModel):
    """The component holding nearly all marks, if any."""

    model_config = ConfigDict(frozen=True)

    component: int | None
    threshold: int
    findings: list[Finding] = Field(default_factory=list)


class WalkTrace(BaseModel):
    """Nodes visited while walking towards large components."""

    model_config = ConfigDict(frozen=True)

    steps: list[int]
    backtrack_at: int | None = Field(default=None, description="step index closing a t1,t2,t1 pattern")
    findings: list[Finding] = Field(default_factory=list)


class PairResult(BaseModel):
    """EF outcome for one pair of decompositions."""

    model_config = ConfigDict(frozen=True)

    g_index: int
    h_index: int
    similar: bool | None = Field(default=None, description="None when the budget ran out")


class RefuteReport(BaseModel):
    """Exhaustive similarity search between decompositions of two structures."""

    model_config = ConfigDict(frozen=True)

    alpha: int
    k: int
    delta: int
    seed: int | None = Field(default=None)
    g_forms: list[str]
    h_forms: list[str]
    g_complete: bool
    h_complete: bool
    pairs_checked: int
    similar_pairs: list[PairResult]
    inconclusive_pairs: list[PairResult]

    @property
    def exhaustive(self) -> bool:
        """Both searches finished and every pair was decided."""
        return self.g_complete and self.h_complete and not self.inconclusive_pairs
