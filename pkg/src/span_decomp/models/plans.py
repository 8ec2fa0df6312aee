"""Parameter plan and bound models."""

from __future__ import annotations

from typing import Annotated

from pydantic import BaseModel, ConfigDict, Field, PlainSerializer

JSON_SAFE_LIMIT = 2**53


def _portable(value: int) -> int | str:
    """Integers beyond double precision are written as decimal strings."""
    return str(value) if abs(value) > JSON_SAFE_LIMIT else value


PortableInt = Annotated[int, PlainSerializer(_portable, when_used="json")]


class InequalityCheck(BaseModel):
    """One evaluated defining inequality."""

    model_config = ConfigDict(frozen=True)

    name: str
    lhs: PortableInt
    relation: str = Field(..., pattern=r"^(>|>=|<|==)$")
    rhs: PortableInt
    holds: bool

    @classmethod
    def evaluate(cls, name: str, lhs: int, relation: str, rhs: int) -> InequalityCheck:
        """Evaluate lhs relation rhs."""
        outcome = {
            ">": lhs > rhs,
            ">=": lhs >= rhs,
            "<": lhs < rhs,
            "==": lhs == rhs,
        }[relation]
        return cls(name=name, lhs=lhs, relation=relation, rhs=rhs, holds=outcome)


class PwPlan(BaseModel):
    """Parameters of the pathwidth construction."""

    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=1)
    delta: int = Field(..., ge=1)
    beta: int = Field(..., ge=0)
    n: int = Field(..., ge=1)
    p: int = Field(..., ge=1)
    m: int = Field(..., ge=1)
    l: int = Field(..., ge=1)  # noqa: E741
    alpha: PortableInt
    conforming: bool = Field(default=True)
    checks: tuple[InequalityCheck, ...] = Field(default=())


class TwPlan(BaseModel):
    """Parameters of the treewidth construction.

    ``alpha`` is left free: it only has to be large enough for the
    counting argument and is never derived in closed form.
    """

    model_config = ConfigDict(frozen=True)

    k: int = Field(..., ge=1)
    delta: int = Field(..., ge=1)
    beta: int = Field(..., ge=0)
    p: int = Field(..., ge=1)
    l: int = Field(..., ge=1)  # noqa: E741
    d: int = Field(..., ge=0)
    d_loose: int = Field(..., ge=0)
    n: int = Field(..., ge=0)
    h: int = Field(..., ge=0)
    N: PortableInt  # noqa: N815
    alpha: int | None = Field(default=None)
    conforming: bool = Field(default=True)
    checks: tuple[InequalityCheck, ...] = Field(default=())


class Bounds(BaseModel):
    """Evaluated size and distance expressions."""

    model_config = ConfigDict(frozen=True)

    cover_size: PortableInt = Field(..., description="upper bound on bags covering one bicolit")
    bicolit_fresh_nodes: PortableInt = Field(..., description="m(2^(b+2)+2pn-3)")
    gadget_size: PortableInt
    bicolit_size: PortableInt
    length_bound: PortableInt = Field(..., description="coarse bound delta(2^(b+4)m+pn)")
    decomposition_length: PortableInt = Field(..., description="bound on the length of a decomposition of H")
    h_size: PortableInt = Field(..., description="lower bound on the size of H")
    bicolit_diameter: PortableInt
    h: int
    N: PortableInt  # noqa: N815
    d: int
    d_loose: int
    domino_width: PortableInt
