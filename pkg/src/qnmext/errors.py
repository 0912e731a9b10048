"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument is outside the domain an operation is defined on."""


class ResourceError(RuntimeError):
    """An exhaustive computation would exceed the configured size limit."""

    def __init__(self, message, size=None):
        super().__init__(message)
        self.size = size


class NumericalError(ArithmeticError):
    """An iterative numerical routine failed to converge."""


class AdversaryError(RuntimeError):
    """A tampering strategy produced a message of the wrong shape."""


class InvariantViolation(AssertionError):
    """A checked inequality or identity failed beyond its tolerance."""
