"""Exception types shared across the package."""

from __future__ import annotations


class RelotError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatch(RelotError, ValueError):
    """A vector or atom cloud does not match the expected dimension."""


class InvalidTime(RelotError, ValueError):
    """A time parameter t was not strictly positive."""


class NotInternalDirection(RelotError, ValueError):
    """The requested direction does not point into the interior of the body."""


class NotOnBoundary(RelotError, ValueError):
    """A boundary-classification entry point was called away from the boundary."""


class MarginalMismatch(RelotError, ValueError):
    """Two plans or measures that must share a marginal do not."""


class ConvexityViolation(RelotError, ValueError):
    """A difference-quotient sequence failed the convexity monotonicity check."""


class ChainSearchFailure(RelotError):
    """No alternating chain exists at the requested mass level.

    ``max_feasible_eps`` is the largest candidate mass for which the search
    does succeed, or None when no candidate works at all.
    """

    def __init__(self, message: str, max_feasible_eps: float | None = None):
        super().__init__(message)
        self.max_feasible_eps = max_feasible_eps


class InfeasibleResult(RelotError, ValueError):
    """An operation requiring a finite solve result got an infinite one."""
