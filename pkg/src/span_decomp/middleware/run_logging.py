"""Command run logging with automatic run_id propagation."""

from __future__ import annotations

import time
import uuid
from contextlib import contextmanager
from typing import TYPE_CHECKING

from span_decomp.logging_config import get_logger, run_context

if TYPE_CHECKING:
    from collections.abc import Iterator

logger = get_logger("span_decomp.middleware")


@contextmanager
def command_run(command: str, *, run_id: str | None = None, seed: int | None = None) -> Iterator[str]:
    """Wrap one CLI command with logging and context propagation.

    Args:
        command: Subcommand name
        run_id: Explicit run id, generated when omitted
        seed: Recorded seed, if the caller passed one

    Yields:
        The run id in effect
    """
    run_id = run_id or str(uuid.uuid4())[:8]
    token = run_context.set({"run_id": run_id, "command": command})
    start_time = time.perf_counter()

    logger.info("Command started", extra={"seed": seed})

    try:
        yield run_id
    except Exception as e:
        duration_ms = (time.perf_counter() - start_time) * 1000
        logger.warning(
            "Command failed",
            extra={
                "error": str(e),
                "error_type": type(e).__name__,
                "duration_ms": round(duration_ms, 2),
            },
        )
        raise
    else:
        duration_ms = (time.perf_counter() - start_time) * 1000
        logger.info("Command completed", extra={"duration_ms": round(duration_ms, 2)})
    finally:
        run_context.reset(token)
