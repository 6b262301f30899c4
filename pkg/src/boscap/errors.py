"""Exception hierarchy shared by every boscap module."""


class BoscapError(Exception):
    """Base class for all boscap errors."""


class DomainError(BoscapError, ValueError):
    """An argument lies outside the domain where the quantity is defined."""


class PositivityError(DomainError):
    """An effective mode frequency would be zero or negative."""


class NumericError(BoscapError, ArithmeticError):
    """A numerical kernel failed to deliver a trustworthy result."""


class NoSignChange(NumericError):
    """The root bracket does not contain a sign change."""


class NoConvergence(NumericError):
    """An iterative method exhausted its iteration budget."""


class NonFinite(NumericError):
    """A computation produced NaN/inf or an unreliable quadrature estimate."""


class TruncationError(NumericError):
    """A truncated Fock ladder leaves too much probability in the tail."""


class IdentityViolation(NumericError):
    """The capacity/partition-function identity failed a consistency check."""
