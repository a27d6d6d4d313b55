"""
Error hierarchy.

Every error carries the process exit code the CLI maps it to:
- UsageError and subclasses: 2 (bad input, bad geometry, unsupported order)
- DomainError and subclasses: 3 (the numbers left their domain of validity)

ConvergenceWarning is a warning, not an error: it is emitted when a result is
returned even though its tail estimate did not settle.
"""

from typing import Any, Optional


class MirrorLabError(Exception):
    """Base class for all lab errors."""
    exit_code = 1


class UsageError(MirrorLabError):
    """Inconsistent or unsupported input."""
    exit_code = 2


class InvalidSpecError(UsageError):
    """Toric curve data violates the geometry invariants."""


class UnsupportedOrderError(UsageError):
    """Requested trace power or particle number is beyond what is implemented."""


class UnsupportedParametersError(UsageError):
    """Parameters outside the validated range of a method."""


class BPSDataError(UsageError):
    """BPS data file is malformed or fails a consistency check."""


class DomainError(MirrorLabError):
    """Numeric-domain error."""
    exit_code = 3


class SingularReversionError(DomainError):
    """Series reversion of a series with vanishing linear term."""


class OutOfDiskError(DomainError):
    """Large-radius evaluation outside the disk of convergence |z| < 1/27."""


class ConifoldSingularityError(DomainError):
    """Genus-one evaluation at or beyond the conifold point."""


class PoleError(DomainError):
    """Evaluation too close to a pole of an instanton sum."""


class TruncationTooSmallError(DomainError):
    """The truncated operator produced a non-positive eigenvalue."""


class PrecisionError(DomainError):
    """Acceleration failed to reach the requested tolerance."""

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial


class ConvergenceWarning(RuntimeWarning):
    """A truncated sum or extrapolation did not settle; partial result returned."""

    def __init__(self, message: str, partial: Optional[Any] = None):
        super().__init__(message)
        self.partial = partial
