"""Operations on structures, decompositions, games and constructions."""

from __future__ import annotations

from span_decomp.services.decompositions import (
    encode_classical,
    ext,
    quotient,
    span,
    validate_td,
    width,
)
from span_decomp.services.ef_engine import ef_equivalent
from span_decomp.services.enumeration import enumerate_decompositions
from span_decomp.services.isomorphism import are_isomorphic
from span_decomp.services.planner import plan_pw, plan_tw, verify_plan
from span_decomp.services.witnesses import canonical_pd_pw, canonical_td_tw

__all__ = [
    "are_isomorphic",
    "canonical_pd_pw",
    "canonical_td_tw",
    "ef_equivalent",
    "encode_classical",
    "enumerate_decompositions",
    "ext",
    "plan_pw",
    "plan_tw",
    "quotient",
    "span",
    "validate_td",
    "verify_plan",
    "width",
]
