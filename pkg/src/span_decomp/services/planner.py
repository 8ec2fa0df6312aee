"""Parameter planning and independent verification of the inequality chains."""

from __future__ import annotations

from span_decomp.exceptions import PlanError
from span_decomp.logging_config import get_logger
from span_decomp.models.plans import Bounds, InequalityCheck, PwPlan, TwPlan
from span_decomp.utils import log_operation

logger = get_logger(__name__)

MAX_TW_N = 2**16


def _require_inputs(k: int, delta: int, beta: int) -> None:
    if k < 1 or delta < 1 or beta < 0:
        msg = f"need k >= 1, delta >= 1, beta >= 0 (got {k}, {delta}, {beta})"
        raise PlanError(msg)


def _least_above(threshold: int, factor: int) -> int:
    """Least positive x with x * factor > threshold, for factor > 0."""
    return max(1, threshold // factor + 1)


# ----------------------------------------------------------------------
# Closed-form expressions


def gadget_size(beta: int, p: int, n: int) -> int:
    """Nodes of one two-path gadget."""
    return 2 ** (beta + 2) + 2 * p * n - 2


def gadget_fresh(beta: int, p: int, n: int) -> int:
    """Nodes one chained gadget adds besides its shared endpoint."""
    return 2 ** (beta + 2) + 2 * p * n - 3


def bicolit_size(beta: int, p: int, n: int, m: int) -> int:
    """Nodes of m gadgets sharing consecutive endpoints."""
    return m * gadget_size(beta, p, n) - (m - 1)


def cover_size(k: int, delta: int, beta: int, p: int, n: int, m: int) -> int:
    """(k+1)[delta(2^(b+4)m+pn)+1]: elements coverable by the bags near one bicolit."""
    return (k + 1) * (delta * (2 ** (beta + 4) * m + p * n) + 1)


def length_bound_pw(delta: int, beta: int, p: int, n: int, m: int) -> int:
    """Coarse bound on the decomposition length spanned by one bicolit."""
    return delta * (2 ** (beta + 4) * m + p * n)


def bicolit_diameter_bound(beta: int, p: int, n: int, m: int) -> int:
    """Distance between the two extreme junctions of a bicolit."""
    return m * (p * n - 1 + 2 ** (beta + 1))


def decomposition_length(k: int, delta: int, beta: int, p: int, n: int, m: int, l: int) -> int:  # noqa: E741
    """(k+1)[n delta m(pn+2^(b+1)) + l]."""
    return (k + 1) * (n * delta * m * (p * n + 2 ** (beta + 1)) + l)


def h_size(beta: int, p: int, n: int, m: int, l: int) -> int:  # noqa: E741
    """(n+1)m(2^(b+2)+2pn-3) + n(l-1)."""
    return (n + 1) * m * gadget_fresh(beta, p, n) + n * (l - 1)


def tw_p(k: int) -> int:
    """Ceiling of log2(k + 2)."""
    return (k + 1).bit_length()


def tw_d(delta: int, p: int) -> int:
    """Distance bound between lozenge sources."""
    return 2 * delta * (p + 2) + 2 * delta


def tw_d_loose(delta: int, p: int) -> int:
    """The intermediate bound 2 delta (p + 2)."""
    return 2 * delta * (p + 2)


def tw_h(n: int, k: int) -> int:
    """Floor of (n - 1 - log2(2k + 3)) / 2, computed exactly."""
    c = 2 * k + 3

    def fits(h: int) -> bool:
        e = n - 1 - 2 * h
        return e >= 0 and c <= 2**e

    h = (n - 1) // 2
    while not fits(h):
        h -= 1
    return h


def tw_N(n: int, h: int, k: int) -> int:  # noqa: N802
    """(2^h - 1) + (4k + 4)(2^(n-h+1) - 1) + 1."""
    return (2**h - 1) + (4 * k + 4) * (2 ** (n - h + 1) - 1) + 1


def domino_width_bound(k: int, d: int) -> int:
    """(9k+7)d(d+1)-1, quoted for reference only."""
    return (9 * k + 7) * d * (d + 1) - 1


def tw_constraints(k: int, n: int, h: int, big_n: int) -> list[InequalityCheck]:
    """The three conditions n must meet."""
    c = 2 * k + 3
    total = 2 ** (n + 1) - 1
    return [
        InequalityCheck.evaluate("leaf-supply", 2 ** (n - h - 1) if n > h else 0, ">=", c * (2**h - 1)),
        InequalityCheck.evaluate("census-room", c * (big_n - 1) + (k + 1), "<", total),
        InequalityCheck.evaluate("large-majority", 2 * (total - (k + 1) - big_n), ">", total),
    ]


@log_operation("Evaluate bounds")
def bounds(k: int, delta: int, beta: int, p: int, n: int, m: int, l: int) -> Bounds:  # noqa: E741
    """Evaluate every closed-form expression at the given parameters."""
    h = max(tw_h(n, k), 0)
    d = tw_d(delta, p)
    return Bounds(
        cover_size=cover_size(k, delta, beta, p, n, m),
        bicolit_fresh_nodes=m * gadget_fresh(beta, p, n),
        gadget_size=gadget_size(beta, p, n),
        bicolit_size=bicolit_size(beta, p, n, m),
        length_bound=length_bound_pw(delta, beta, p, n, m),
        decomposition_length=decomposition_length(k, delta, beta, p, n, m, l),
        h_size=h_size(beta, p, n, m, l),
        bicolit_diameter=bicolit_diameter_bound(beta, p, n, m),
        h=h,
        N=tw_N(n, h, k),
        d=d,
        d_loose=tw_d_loose(delta, p),
        domino_width=domino_width_bound(k, d),
    )


# ----------------------------------------------------------------------
# Pathwidth plans


def pw_checks(plan: PwPlan) -> list[InequalityCheck]:
    """Re-evaluate every defining inequality of a pathwidth plan."""
    k, delta, beta, n, p, m, l = plan.k, plan.delta, plan.beta, plan.n, plan.p, plan.m, plan.l
    slack = gadget_fresh(beta, p, n) - (k + 1) * delta * 2 ** (beta + 4)
    return [
        InequalityCheck.evaluate("n-odd", n % 2, "==", 1),
        InequalityCheck.evaluate("n-above-k", n, ">=", k + 2),
        InequalityCheck.evaluate("alpha", plan.alpha, "==", delta * (n + 1)),
        InequalityCheck.evaluate("l-positive", l, ">=", 1),
        InequalityCheck.evaluate("p-slack", slack, ">", 0),
        InequalityCheck.evaluate("m-slack", m * slack, ">", (k + 1) * (delta * p * n + 1)),
        InequalityCheck.evaluate(
            "size-beats-cover", m * gadget_fresh(beta, p, n), ">", cover_size(k, delta, beta, p, n, m)
        ),
        InequalityCheck.evaluate(
            "l-slack",
            l * (n - k - 1),
            ">",
            (k + 1) * n * delta * m * (p * n + 2 ** (beta + 1)) - (n + 1) * m * gadget_fresh(beta, p, n) + n,
        ),
        InequalityCheck.evaluate(
            "size-beats-length",
            h_size(beta, p, n, m, l),
            ">",
            decomposition_length(k, delta, beta, p, n, m, l),
        ),
    ]


@log_operation("Plan pathwidth parameters")
def plan_pw(
    k: int,
    delta: int,
    beta: int,
    *,
    p: int | None = None,
    n: int | None = None,
    m: int | None = None,
    l: int | None = None,  # noqa: E741
) -> PwPlan:
    """Choose the least parameters satisfying the pathwidth inequalities.

    n is k + 2 when that is odd and k + 3 otherwise. Explicit values replace
    the planned ones and mark the plan as non-conforming.

    Raises:
        PlanError: If inputs are out of range
    """
    _require_inputs(k, delta, beta)
    overridden = any(v is not None for v in (p, n, m, l))
    n = n if n is not None else (k + 2 if (k + 2) % 2 else k + 3)
    if p is None:
        p = _least_above((k + 1) * delta * 2 ** (beta + 4) - 2 ** (beta + 2) + 3, 2 * n)
    slack = gadget_fresh(beta, p, n) - (k + 1) * delta * 2 ** (beta + 4)
    if m is None:
        if slack <= 0:
            msg = f"p = {p} leaves no slack for m"
            raise PlanError(msg)
        m = _least_above((k + 1) * (delta * p * n + 1), slack)
    if l is None:
        if n - k - 1 <= 0:
            msg = f"n = {n} must exceed k + 1 to choose l"
            raise PlanError(msg)
        rhs = (k + 1) * n * delta * m * (p * n + 2 ** (beta + 1)) - (n + 1) * m * gadget_fresh(beta, p, n) + n
        l = _least_above(rhs, n - k - 1)  # noqa: E741
    plan = PwPlan(k=k, delta=delta, beta=beta, n=n, p=p, m=m, l=l, alpha=delta * (n + 1), conforming=not overridden)
    return plan.model_copy(update={"checks": tuple(pw_checks(plan))})


# ----------------------------------------------------------------------
# Treewidth plans


def tw_checks(plan: TwPlan) -> list[InequalityCheck]:
    """Re-evaluate every defining relation of a treewidth plan."""
    k, delta, beta, n = plan.k, plan.delta, plan.beta, plan.n
    h = tw_h(n, k)
    return [
        InequalityCheck.evaluate("p-formula", plan.p, "==", tw_p(k)),
        InequalityCheck.evaluate("l-formula", plan.l, "==", 2**beta),
        InequalityCheck.evaluate("d-formula", plan.d, "==", tw_d(delta, plan.p)),
        InequalityCheck.evaluate("h-nonnegative", h, ">=", 0),
        InequalityCheck.evaluate("h-formula", plan.h, "==", h),
        InequalityCheck.evaluate("N-formula", plan.N, "==", tw_N(n, plan.h, k)),
        *tw_constraints(k, n, plan.h, plan.N),
    ]


@log_operation("Plan treewidth parameters")
def plan_tw(
    k: int,
    delta: int,
    beta: int,
    *,
    n: int | None = None,
    alpha: int | None = None,
) -> TwPlan:
    """Choose p, l, d and the least n meeting all three n-constraints.

    An explicit n yields a non-conforming plan with h clamped at 0.

    Raises:
        PlanError: If inputs are out of range or no n up to 2^16 works
    """
    _require_inputs(k, delta, beta)
    p = tw_p(k)
    conforming = n is None
    if n is None:
        for candidate in range(1, MAX_TW_N + 1):
            h = tw_h(candidate, k)
            if h < 0:
                continue
            if all(c.holds for c in tw_constraints(k, candidate, h, tw_N(candidate, h, k))):
                n = candidate
                break
        else:
            msg = f"no n <= {MAX_TW_N} satisfies the constraints for k = {k}"
            raise PlanError(msg)
    h = max(tw_h(n, k), 0)
    plan = TwPlan(
        k=k,
        delta=delta,
        beta=beta,
        p=p,
        l=2**beta,
        d=tw_d(delta, p),
        d_loose=tw_d_loose(delta, p),
        n=n,
        h=h,
        N=tw_N(n, h, k),
        alpha=alpha,
        conforming=conforming,
    )
    logger.debug("Treewidth plan chosen", extra={"n": n, "h": h})
    return plan.model_copy(update={"checks": tuple(tw_checks(plan))})


def verify_plan(plan: PwPlan | TwPlan) -> list[InequalityCheck]:
    """Failed checks of a plan, recomputed from scratch; empty means ok."""
    checks = pw_checks(plan) if isinstance(plan, PwPlan) else tw_checks(plan)
    return [c for c in checks if not c.holds]
