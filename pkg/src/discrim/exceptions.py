"""Exception hierarchy.

``DomainError`` and ``ValidationError`` are ``ValueError`` subclasses so that
callers treating bad input generically keep working.
"""


class DiscrimError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(DiscrimError, ValueError):
    """An argument lies outside the domain of the operation."""


class NotPSDError(DomainError):
    """A matrix required to be positive semidefinite is not."""


class ValidationError(DiscrimError, ValueError):
    """A value violates a data-type invariant (ensemble, density matrix, POVM)."""


class NumericError(DiscrimError, ArithmeticError):
    """A numerical routine failed or produced an inconsistent result."""


class DegenerateIterationError(NumericError):
    """An iterative measurement update hit a numerically zero normalizer."""


class BoundViolationError(NumericError):
    """A proven inequality chain failed beyond tolerance."""
