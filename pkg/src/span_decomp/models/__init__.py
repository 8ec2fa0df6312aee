"""Domain models."""

from __future__ import annotations

from span_decomp.models.decomposition import (
    NO_MARK,
    BagClass,
    ClassicalDecomposition,
    Condition,
    KBag,
    Occurrences,
    QuotientMap,
    TreeDecomposition,
    Violation,
)
from span_decomp.models.plans import Bounds, InequalityCheck, PwPlan, TwPlan
from span_decomp.models.reports import (
    Finding,
    InodeCensus,
    Lemma1Report,
    OverlapProfile,
    RefuteReport,
    SearchConfig,
    SearchOutcome,
    TrimResult,
    WalkTrace,
)
from span_decomp.models.structure import (
    COLORS,
    SIGMA,
    Annotation,
    RelationSymbol,
    Role,
    Side,
    Structure,
    Vocabulary,
)

__all__ = [
    "COLORS",
    "NO_MARK",
    "SIGMA",
    "Annotation",
    "BagClass",
    "Bounds",
    "ClassicalDecomposition",
    "Condition",
    "Finding",
    "InequalityCheck",
    "InodeCensus",
    "KBag",
    "Lemma1Report",
    "Occurrences",
    "OverlapProfile",
    "PwPlan",
    "QuotientMap",
    "RefuteReport",
    "RelationSymbol",
    "Role",
    "SearchConfig",
    "SearchOutcome",
    "Side",
    "Structure",
    "TreeDecomposition",
    "TrimResult",
    "TwPlan",
    "Violation",
    "Vocabulary",
    "WalkTrace",
]
