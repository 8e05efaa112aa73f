"""
Exception hierarchy shared by every module of the toolkit.
"""
from typing import Any, Optional


class ToolkitError(Exception):
    """Base class for all toolkit errors."""


class FieldError(ToolkitError, ValueError):
    """Invalid field modulus, division by zero or malformed vector."""


class PointSetError(ToolkitError, ValueError):
    """Malformed point-set input."""


class UsageError(ToolkitError):
    """Unknown lemma id or inconsistent command parameters."""


class CapExceededError(ToolkitError):
    """A configured work cap would be exceeded."""

    def __init__(self, cap_name: str, required: int, limit: int):
        self.cap_name = cap_name
        self.required = required
        self.limit = limit
        super().__init__(
            f"{cap_name} exceeded: requires {required}, configured limit is {limit}"
        )


class RoundLimitError(ToolkitError):
    """Randomised construction ran out of retry rounds."""

    def __init__(self, rounds: int, target: int, best: Optional[Any] = None):
        self.rounds = rounds
        self.target = target
        self.best = best
        best_size = len(best) if best is not None else 0
        super().__init__(
            f"no attempt reached size {target} within {rounds} rounds "
            f"(best attempt has {best_size})"
        )
