"""Utility modules."""

from span_decomp.utils.budget import Budget
from span_decomp.utils.logging_decorators import log_operation

__all__ = ["Budget", "log_operation"]
