"""Exception hierarchy shared across the package.

`ValidationError` maps to CLI exit code 2, `NumericalError` (and its
subclasses) to exit code 3.
"""

__all__ = [
    "KinkstabError",
    "ValidationError",
    "NumericalError",
    "NearSingularError",
    "StagnationError",
    "NonConvergenceError",
    "InterpolationRangeError",
    "CriterionFailure",
]


class KinkstabError(Exception):
    pass


class ValidationError(KinkstabError):
    """Bad inputs or configuration, caught before any numerics run."""


class NumericalError(KinkstabError):
    """A solver failed to produce a trustworthy result."""


class NearSingularError(NumericalError):
    """Shifted tridiagonal solve hit a pivot below the breakdown threshold."""


class StagnationError(NumericalError):
    """Inverse iteration failed to reach the residual tolerance."""


class NonConvergenceError(NumericalError):
    """Fixed-point or Newton iteration exhausted its budget."""


class InterpolationRangeError(NumericalError):
    """A translated field was queried outside the tabulated grid."""


class CriterionFailure(NumericalError):
    """A sign condition the theory guarantees did not hold numerically."""
