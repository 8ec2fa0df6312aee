"""Command-line surface."""

from span_decomp.cli.parser import build_parser

__all__ = ["build_parser"]
