"""Argument parser for the span-decomp command line."""

from __future__ import annotations

import argparse
import sys
from typing import NoReturn

from span_decomp import __version__
from span_decomp.cli import commands

GENERATORS = (
    "gadget",
    "bicol",
    "bicolit",
    "loz",
    "pw-G",
    "pw-H",
    "tw-G",
    "tw-H",
    "linear-order",
    "path",
    "cycle",
)
OVERRIDE_KEYS = ("p", "n", "m", "l")


def parse_overrides(text: str) -> dict[str, int]:
    """Parse 'p=1,n=3' into a mapping."""
    found: dict[str, int] = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        key, sep, value = item.partition("=")
        if not sep or key not in OVERRIDE_KEYS:
            msg = f"override must look like p=1,n=3 with keys {', '.join(OVERRIDE_KEYS)}"
            raise argparse.ArgumentTypeError(msg)
        try:
            found[key] = int(value)
        except ValueError as e:
            msg = f"override {key} needs an integer, got {value!r}"
            raise argparse.ArgumentTypeError(msg) from e
    return found


def parse_grid(text: str) -> tuple[int, int, int]:
    """Parse 'kmax,dmax,bmax'."""
    parts = text.split(",")
    try:
        k, d, b = (int(p) for p in parts)
    except ValueError as e:
        msg = "grid must look like kmax,dmax,bmax"
        raise argparse.ArgumentTypeError(msg) from e
    if k < 1 or d < 1 or b < 0:
        msg = "grid needs kmax >= 1, dmax >= 1, bmax >= 0"
        raise argparse.ArgumentTypeError(msg)
    return k, d, b


class _Parser(argparse.ArgumentParser):
    """Parser whose usage errors exit 3, keeping 2 for exhausted budgets."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(commands.EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _budget_flags() -> argparse.ArgumentParser:
    flags = argparse.ArgumentParser(add_help=False)
    flags.add_argument(
        "--budget-nodes", type=int, default=argparse.SUPPRESS, help="node budget for searches and games"
    )
    flags.add_argument("--budget-seconds", type=float, default=argparse.SUPPRESS, help="time budget in seconds")
    return flags


def _add_search_bounds(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, required=True, help="width bound")
    parser.add_argument("--delta", type=int, required=True, help="span bound")
    parser.add_argument("--path-only", action="store_true", help="only single-branch trees")
    parser.add_argument("--max-tree-nodes", type=int, default=None, help="tree size cap")
    parser.add_argument("--workers", type=int, default=None, help="enumeration workers")


def build_parser() -> argparse.ArgumentParser:
    """Create the top-level parser with one subparser per command."""
    parser = _Parser(
        prog="span-decomp",
        description="Width- and span-bounded decompositions of relational structures.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=None, help="recorded in reports; generation is deterministic")
    parser.add_argument("--budget-nodes", type=int, default=None, help="node budget for searches and games")
    parser.add_argument("--budget-seconds", type=float, default=None, help="time budget in seconds")
    parser.add_argument("--log-level", default=None, help="overrides SPAN_DECOMP_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a gadget or construction")
    gen.add_argument("family", choices=GENERATORS)
    gen.add_argument("--k", type=int, default=1)
    gen.add_argument("--delta", type=int, default=1)
    gen.add_argument("--beta", type=int, default=0)
    gen.add_argument("--p", type=int, default=None)
    gen.add_argument("--n", type=int, default=None)
    gen.add_argument("--m", type=int, default=None)
    gen.add_argument("--l", type=int, default=None)
    gen.add_argument("--n1", type=int, default=0)
    gen.add_argument("--n2", type=int, default=0)
    gen.add_argument("--size", type=int, default=None, help="size of linear-order, path or cycle")
    gen.add_argument("--override", type=parse_overrides, default={}, help="plan overrides, e.g. p=1,n=3,m=2,l=1")
    gen.add_argument("-o", "--output", default=None)
    gen.set_defaults(handler=commands.gen)

    plan = sub.add_parser("plan", help="plan construction parameters")
    plan.add_argument("--k", type=int, required=True)
    plan.add_argument("--delta", type=int, required=True)
    plan.add_argument("--beta", type=int, required=True)
    plan.add_argument("--tw", action="store_true", help="treewidth plan instead of pathwidth")
    plan.add_argument("--alpha", type=int, default=None, help="free alpha of a treewidth plan")
    plan.add_argument("--override", type=parse_overrides, default={})
    plan.set_defaults(handler=commands.plan)

    verify = sub.add_parser("verify-bounds", help="check every planned inequality over a grid")
    verify.add_argument("--grid", type=parse_grid, default=(4, 4, 6), help="kmax,dmax,bmax")
    verify.set_defaults(handler=commands.verify_bounds)

    check = sub.add_parser("check", help="validate a decomposition file")
    check.add_argument("decomposition")
    check.add_argument("--structure", default=None, help="also require ext to be isomorphic to this")
    check.set_defaults(handler=commands.check)

    for name, handler in (("span", commands.span), ("width", commands.width)):
        measure = sub.add_parser(name, help=f"print the {name} of a decomposition")
        measure.add_argument("decomposition")
        measure.set_defaults(handler=handler)

    ext = sub.add_parser("ext", help="rebuild the decomposed structure")
    ext.add_argument("decomposition")
    ext.add_argument("-o", "--output", default=None)
    ext.set_defaults(handler=commands.ext)

    canonical = sub.add_parser("canonical", help="canonical decomposition of a generated structure")
    canonical.add_argument("structure")
    canonical.add_argument("--tw", choices=("sp", "sweep"), default=None, help="treewidth variant")
    canonical.add_argument("-o", "--output", default=None)
    canonical.set_defaults(handler=commands.canonical)

    budgets = _budget_flags()
    ef = sub.add_parser("ef", parents=[budgets], help="Ehrenfeucht-Fraisse equivalence; exit 0, 1 or 2")
    ef.add_argument("first")
    ef.add_argument("second")
    ef.add_argument("--rank", type=int, required=True)
    ef.set_defaults(handler=commands.ef)

    search = sub.add_parser("search", parents=[budgets], help="enumerate small decompositions as JSON lines")
    search.add_argument("structure")
    _add_search_bounds(search)
    search.add_argument("--lemma1", action="store_true", help="also check distance transfer on each result")
    search.set_defaults(handler=commands.search)

    refute = sub.add_parser("refute", parents=[budgets], help="look for similar decompositions of two structures")
    refute.add_argument("first")
    refute.add_argument("second")
    refute.add_argument("--alpha", type=int, required=True)
    _add_search_bounds(refute)
    refute.set_defaults(handler=commands.refute)

    dot = sub.add_parser("export-dot", help="render a structure or decomposition file")
    dot.add_argument("document")
    dot.add_argument("-o", "--output", default=None)
    dot.set_defaults(handler=commands.export_dot)

    pace = sub.add_parser("import-pace", help="convert a .gr/.td pair into a decomposition file")
    pace.add_argument("graph")
    pace.add_argument("decomposition")
    pace.add_argument("-o", "--output", default=None)
    pace.add_argument("--structure-output", default=None)
    pace.set_defaults(handler=commands.import_pace)

    return parser
