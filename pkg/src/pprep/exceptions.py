"""Semantic exception hierarchy shared across the package."""

from __future__ import annotations


class PprepError(Exception):
    """Base error for this package."""


class DomainError(PprepError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UnsupportedDomainError(DomainError):
    """Parameters fall outside the numerically supported regime.

    Raised instead of silently returning an inaccurate value.
    """


class ConvergenceError(PprepError, RuntimeError):
    """Numerical integration failed to reach the requested tolerance.

    Carries the best available estimate and its error estimate so callers
    can inspect how far off the computation ended up.
    """

    def __init__(self, message: str, best_estimate: float, err_estimate: float):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.err_estimate = err_estimate


class GridStateError(PprepError, RuntimeError):
    """A density grid is in the wrong state for the requested operation."""


class InputValidationError(PprepError, ValueError):
    """Study records or configuration violate the input contract."""

    def __init__(self, message: str, *, field: str | None = None, line: int | None = None):
        super().__init__(message)
        self.field = field
        self.line = line
