"""Command handlers. Each takes the parsed arguments and returns an exit code."""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import TYPE_CHECKING, Any

from span_decomp.config import get_settings
from span_decomp.exceptions import BudgetExceededError
from span_decomp.logging_config import get_logger
from span_decomp.models.decomposition import TreeDecomposition
from span_decomp.models.plans import PwPlan, TwPlan
from span_decomp.models.reports import SearchConfig
from span_decomp.repositories import (
    JsonRepository,
    PaceRepository,
    decomposition_to_document,
    decomposition_to_dot,
    dumps,
    structure_to_document,
    structure_to_dot,
)
from span_decomp.services import decompositions, gadgets, planner, structures, witnesses
from span_decomp.services.ef_engine import ef_equivalent
from span_decomp.services.enumeration import enumerate_decompositions
from span_decomp.services.falsifier import check_lemma1, micro_refute
from span_decomp.services.isomorphism import are_isomorphic

if TYPE_CHECKING:
    import argparse

    from span_decomp.models.structure import Structure

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_BUDGET = 2
EXIT_ERROR = 3


def _emit(text: str, output: str | None = None) -> None:
    if output is None:
        sys.stdout.write(text)
        return
    path = Path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info("Output written", extra={"path": str(path), "bytes": len(text)})


def _line(record: dict[str, Any]) -> str:
    return json.dumps(record, sort_keys=True, separators=(",", ":")) + "\n"


def _budgets(args: argparse.Namespace) -> tuple[int, float]:
    settings = get_settings()
    nodes = args.budget_nodes if args.budget_nodes is not None else settings.budget_nodes
    seconds = args.budget_seconds if args.budget_seconds is not None else settings.budget_seconds
    return nodes, seconds


def _search_config(args: argparse.Namespace) -> SearchConfig:
    settings = get_settings()
    nodes, seconds = _budgets(args)
    return SearchConfig(
        k=args.k,
        delta=args.delta,
        path_only=args.path_only,
        max_tree_nodes=args.max_tree_nodes or settings.max_tree_nodes,
        budget_nodes=nodes,
        budget_seconds=seconds,
        workers=args.workers or settings.workers,
    )


def _load_decomposition(name: str) -> TreeDecomposition:
    return JsonRepository().load_decomposition(name)


def _load_structure(name: str) -> Structure:
    return JsonRepository().load_structure(name)


# =============================================================================
# GENERATION AND PLANNING
# =============================================================================


def _pw_plan(args: argparse.Namespace) -> PwPlan:
    return planner.plan_pw(args.k, args.delta, args.beta, **args.override)


def _tw_plan(args: argparse.Namespace) -> TwPlan:
    alpha = getattr(args, "alpha", None)
    return planner.plan_tw(args.k, args.delta, args.beta, n=args.override.get("n"), alpha=alpha)


def _value(args: argparse.Namespace, key: str, default: int = 1) -> int:
    explicit = getattr(args, key)
    if explicit is not None:
        return int(explicit)
    return int(args.override.get(key, default))


def gen(args: argparse.Namespace) -> int:
    """Generate one structure and write it as a structure file."""
    node_cap = get_settings().node_cap
    family = args.family
    beta = args.beta
    if family == "gadget":
        structure = gadgets.make_gadget(beta, _value(args, "p"), _value(args, "n"))
    elif family == "bicol":
        structure = gadgets.make_bicol(beta, _value(args, "p"), _value(args, "n"), args.n1, args.n2)
    elif family == "bicolit":
        structure = gadgets.make_bicolit(
            beta, _value(args, "p"), _value(args, "n"), args.n1, args.n2, _value(args, "m"), node_cap=node_cap
        )
    elif family == "loz":
        structure = gadgets.make_loz(_value(args, "p"), _value(args, "l"))
    elif family in ("pw-G", "pw-H"):
        plan = _pw_plan(args)
        build = gadgets.build_pw_G if family == "pw-G" else gadgets.build_pw_H
        structure = build(plan, node_cap=node_cap)
    elif family in ("tw-G", "tw-H"):
        plan_t = _tw_plan(args)
        build_t = gadgets.build_tw_G if family == "tw-G" else gadgets.build_tw_H
        structure = build_t(plan_t, node_cap=node_cap)
    else:
        size = args.size if args.size is not None else 3
        makers = {
            "linear-order": structures.linear_order,
            "path": structures.undirected_path,
            "cycle": structures.cycle,
        }
        structure = makers[family](size)
    logger.info("Structure generated", extra={"family": family, "size": structure.size})
    _emit(dumps(structure_to_document(structure)), args.output)
    return EXIT_OK


def plan(args: argparse.Namespace) -> int:
    """Print a plan with its evaluated inequalities; exit 1 if any fails."""
    chosen: PwPlan | TwPlan = _tw_plan(args) if args.tw else _pw_plan(args)
    record: dict[str, Any] = {"plan": chosen.model_dump(mode="json")}
    if isinstance(chosen, PwPlan):
        record["bounds"] = planner.bounds(
            chosen.k, chosen.delta, chosen.beta, chosen.p, chosen.n, chosen.m, chosen.l
        ).model_dump(mode="json")
    _emit(dumps(record))
    return EXIT_OK if not planner.verify_plan(chosen) else EXIT_FAILED


def verify_bounds(args: argparse.Namespace) -> int:
    """Plan every grid point and re-verify all inequalities."""
    kmax, dmax, bmax = args.grid
    rows = ["k delta beta pw tw"]
    failures = 0
    for k in range(1, kmax + 1):
        for delta in range(1, dmax + 1):
            for beta in range(bmax + 1):
                verdicts = []
                for chosen in (planner.plan_pw(k, delta, beta), planner.plan_tw(k, delta, beta)):
                    failed = planner.verify_plan(chosen)
                    failures += bool(failed)
                    verdicts.append("ok" if not failed else "FAIL:" + ",".join(c.name for c in failed))
                rows.append(f"{k} {delta} {beta} {verdicts[0]} {verdicts[1]}")
    _emit("\n".join(rows) + "\n")
    return EXIT_OK if not failures else EXIT_FAILED


# =============================================================================
# DECOMPOSITIONS
# =============================================================================


def check(args: argparse.Namespace) -> int:
    """Print violations, width and span; exit 0 iff valid."""
    td = _load_decomposition(args.decomposition)
    violations = decompositions.validate_td(td)
    record: dict[str, Any] = {
        "ok": not violations,
        "violations": [v.model_dump(mode="json") for v in violations],
        "width": decompositions.width(td),
    }
    if not violations:
        record["span"] = decompositions.span(td)
        if args.structure is not None:
            rebuilt, _ = decompositions.ext(td)
            record["isomorphic"] = are_isomorphic(rebuilt, _load_structure(args.structure))
            record["ok"] = record["isomorphic"]
    _emit(dumps(record))
    return EXIT_OK if record["ok"] else EXIT_FAILED


def span(args: argparse.Namespace) -> int:
    """Print the span."""
    _emit(f"{decompositions.span(_load_decomposition(args.decomposition))}\n")
    return EXIT_OK


def width(args: argparse.Namespace) -> int:
    """Print the width."""
    _emit(f"{decompositions.width(_load_decomposition(args.decomposition))}\n")
    return EXIT_OK


def ext(args: argparse.Namespace) -> int:
    """Write the structure a decomposition reconstructs."""
    rebuilt, _ = decompositions.ext(_load_decomposition(args.decomposition))
    _emit(dumps(structure_to_document(rebuilt)), args.output)
    return EXIT_OK


def canonical(args: argparse.Namespace) -> int:
    """Write the canonical decomposition of a generated structure."""
    structure = _load_structure(args.structure)
    if args.tw is None:
        td = witnesses.canonical_pd_pw(structure)
    else:
        td = witnesses.canonical_td_tw(structure, args.tw)
    _emit(dumps(decomposition_to_document(td)), args.output)
    return EXIT_OK


def import_pace(args: argparse.Namespace) -> int:
    """Convert a PACE graph and decomposition into a decomposition file."""
    repo = PaceRepository()
    structure = repo.load_graph(args.graph)
    k, classical = repo.load_decomposition(args.decomposition)
    td = decompositions.encode_classical(structure, classical, k=max(k, classical.width))
    if args.structure_output is not None:
        _emit(dumps(structure_to_document(structure)), args.structure_output)
    _emit(dumps(decomposition_to_document(td)), args.output)
    return EXIT_OK


def export_dot(args: argparse.Namespace) -> int:
    """Render a structure or decomposition file as DOT."""
    loaded = JsonRepository().load_any(args.document)
    stem = Path(args.document).stem
    if isinstance(loaded, TreeDecomposition):
        text = decomposition_to_dot(loaded, name=stem)
    else:
        text = structure_to_dot(loaded, name=stem)
    _emit(text, args.output)
    return EXIT_OK


# =============================================================================
# GAMES AND SEARCH
# =============================================================================


def ef(args: argparse.Namespace) -> int:
    """Exit 0 if equivalent, 1 if distinguishable, 2 if the budget ran out."""
    first = _load_structure(args.first)
    second = _load_structure(args.second)
    nodes, seconds = _budgets(args)
    try:
        equivalent = ef_equivalent(first, second, args.rank, budget_nodes=nodes, budget_seconds=seconds)
    except BudgetExceededError as e:
        _emit(_line({"result": "budget-exceeded", "nodes": e.nodes, "seconds": round(e.seconds, 3)}))
        return EXIT_BUDGET
    _emit(_line({"result": "equivalent" if equivalent else "distinguishable", "rank": args.rank}))
    return EXIT_OK if equivalent else EXIT_FAILED


def search(args: argparse.Namespace) -> int:
    """Stream every decomposition found as one JSON line each."""
    structure = _load_structure(args.structure)
    config = _search_config(args)
    outcome = enumerate_decompositions(structure, config)
    lines = [_line({"type": "search", "seed": args.seed, **config.model_dump(mode="json")})]
    violations = 0
    for form, td in zip(outcome.canonical_forms, outcome.decompositions, strict=True):
        lines.append(_line({"type": "decomposition", "form": form, "decomposition": decomposition_to_document(td)}))
        if args.lemma1:
            report = check_lemma1(structure, td, config.delta)
            if not report.ok:
                violations += 1
                lines.append(_line({"type": "finding", "form": form, "lemma1": report.model_dump(mode="json")}))
    summary = {"type": "summary", "count": len(outcome.decompositions), "complete": outcome.complete}
    lines.append(_line({**summary, "explored": outcome.explored}))
    _emit("".join(lines))
    if not outcome.complete:
        return EXIT_BUDGET
    return EXIT_OK if not violations else EXIT_FAILED


def refute(args: argparse.Namespace) -> int:
    """Write the similarity report for two structures."""
    first = _load_structure(args.first)
    second = _load_structure(args.second)
    config = _search_config(args)
    nodes, _ = _budgets(args)
    report = micro_refute(first, second, config, args.alpha, seed=args.seed, ef_budget_nodes=nodes)
    _emit(dumps(report.model_dump(mode="json")))
    if not report.exhaustive:
        return EXIT_BUDGET
    return EXIT_OK


__all__ = [
    "EXIT_BUDGET",
    "EXIT_FAILED",
    "EXIT_OK",
    "canonical",
    "check",
    "ef",
    "export_dot",
    "ext",
    "gen",
    "import_pace",
    "plan",
    "refute",
    "search",
    "span",
    "verify_bounds",
    "width",
]
