"""Custom exceptions for the toolkit."""

from __future__ import annotations


class AppError(Exception):
    """Base exception for all toolkit errors."""


class DomainError(AppError):
    """Raised when an element, node or class id is unknown."""


class PreconditionError(AppError):
    """Raised when an operation receives input violating its precondition."""


class WidthError(PreconditionError):
    """Raised when a bag exceeds the width budget k + 1."""


class MergeConflictError(AppError):
    """Raised when merged bag elements carry incompatible colors."""

    def __init__(self, message: str, class_id: int, colors: frozenset[str]) -> None:
        """Initialize with the offending class.

        Args:
            message: Human readable description
            class_id: Quotient class holding the conflicting members
            colors: Union of the colors found inside the class
        """
        super().__init__(message)
        self.class_id = class_id
        self.colors = colors


class AnnotationError(AppError):
    """Raised when generator annotations needed by an operation are missing."""


class PlanError(AppError):
    """Raised when parameter planning fails or a plan is unusable."""


class NodeCapError(PlanError):
    """Raised when a generated structure would exceed the configured node cap."""


class BudgetExceededError(AppError):
    """Raised when a node or time budget is exhausted."""

    def __init__(self, message: str, nodes: int, seconds: float) -> None:
        """Initialize with the consumed resources.

        Args:
            message: Human readable description
            nodes: Search nodes consumed when the budget ran out
            seconds: Wall-clock seconds consumed
        """
        super().__init__(message)
        self.nodes = nodes
        self.seconds = seconds


class ImpossibleCensusError(AppError):
    """Raised when two components both exceed the large-component threshold."""


class ParseError(AppError):
    """Raised when an input file is malformed."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None) -> None:
        """Initialize with the location of the problem.

        Args:
            message: Human readable description
            path: File being parsed, if any
            line: 1-based line number, if known
        """
        location = path or "<input>"
        if line is not None:
            location = f"{location}:{line}"
        super().__init__(f"{location}: {message}")
        self.message = message
        self.path = path
        self.line = line
