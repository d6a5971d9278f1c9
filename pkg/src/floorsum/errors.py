"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "DomainError",
    "PrecisionCapError",
    "IndeterminateFloorError",
    "BudgetExceededError",
    "SegmentAborted",
]


class DomainError(ValueError):
    """Inputs outside an operation's documented domain."""


class PrecisionCapError(ArithmeticError):
    """Requested precision exceeds the configured cap.

    Carries the widest enclosure that was achieved so callers can inspect
    how close the computation got.
    """

    def __init__(self, message: str, enclosure=None):
        super().__init__(message)
        self.enclosure = enclosure


class IndeterminateFloorError(ArithmeticError):
    """A floor or ceiling stayed undecided at the precision cap.

    Raised instead of guessing; carries the precision at which the
    computation gave up.
    """

    def __init__(self, message: str, precision_bits: int | None = None):
        super().__init__(message)
        self.precision_bits = precision_bits


class BudgetExceededError(RuntimeError):
    """A sum or scan would exceed its configured term budget."""


class SegmentAborted(RuntimeError):
    """A scan segment hit arithmetic indeterminacy and was not marked."""

    def __init__(self, lo: int, hi: int, message: str):
        super().__init__(f"segment ({lo}, {hi}]: {message}")
        self.lo = lo
        self.hi = hi
