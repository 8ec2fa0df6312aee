"""Node and wall-clock budgets shared by the search procedures."""

from __future__ import annotations

import threading
import time

from span_decomp.exceptions import BudgetExceededError


class Budget:
    """Counts search nodes and raises once a node or time cap is hit.

    A budget may be shared between threads; the counter is lock-protected.
    """

    def __init__(
        self,
        max_nodes: int | None = None,
        max_seconds: float | None = None,
        *,
        label: str = "search",
    ) -> None:
        """Initialize budget.

        Args:
            max_nodes: Node cap, None for unlimited
            max_seconds: Wall-clock cap, None for unlimited
            label: Name used in the error message
        """
        self.max_nodes = max_nodes
        self.max_seconds = max_seconds
        self.label = label
        self.nodes = 0
        self._start = time.perf_counter()
        self._lock = threading.Lock()

    @property
    def elapsed(self) -> float:
        """Seconds since the budget was created."""
        return time.perf_counter() - self._start

    def tick(self, count: int = 1) -> None:
        """Consume nodes and enforce both caps.

        Raises:
            BudgetExceededError: If a cap is exceeded
        """
        with self._lock:
            self.nodes += count
            nodes = self.nodes
        if self.max_nodes is not None and nodes > self.max_nodes:
            raise BudgetExceededError(
                f"{self.label} exceeded node budget {self.max_nodes}",
                nodes=nodes,
                seconds=self.elapsed,
            )
        # clock reads are cheap but not free
        if self.max_seconds is not None and nodes % 256 == 0 and self.elapsed > self.max_seconds:
            raise BudgetExceededError(
                f"{self.label} exceeded time budget {self.max_seconds}s",
                nodes=nodes,
                seconds=self.elapsed,
            )
