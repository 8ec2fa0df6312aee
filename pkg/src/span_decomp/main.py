"""Command-line entry point."""

from __future__ import annotations

import sys
from typing import TYPE_CHECKING

from span_decomp.cli import build_parser
from span_decomp.cli.commands import EXIT_BUDGET, EXIT_ERROR
from span_decomp.config import get_settings
from span_decomp.exceptions import AppError, BudgetExceededError
from span_decomp.logging_config import get_logger, setup_logging
from span_decomp.middleware import command_run

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = get_logger("span_decomp.main")


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, configure logging and run one command.

    Returns:
        0 on success, 1 when a check fails or structures are distinguishable,
        2 when a budget runs out, 3 on invalid input or usage
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    settings = get_settings()

    # JSON in production, readable in development
    setup_logging(
        level=(args.log_level or settings.log_level).upper(),
        json_format=settings.environment != "development",
        log_file=settings.log_file,
    )

    try:
        with command_run(args.command, seed=args.seed):
            code: int = args.handler(args)
    except BudgetExceededError as e:
        sys.stderr.write(f"budget exceeded: {e}\n")
        return EXIT_BUDGET
    except AppError as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_ERROR
    return code


if __name__ == "__main__":
    sys.exit(main())
