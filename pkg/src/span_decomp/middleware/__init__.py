"""Run-scoped middleware."""

from span_decomp.middleware.run_logging import command_run

__all__ = ["command_run"]
