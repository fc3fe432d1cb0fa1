"""Exception types shared across the package."""


class ShrubError(Exception):
    """Base class for all package errors."""


class ParseError(ShrubError, ValueError):
    """Malformed input file. Carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(ShrubError, ValueError):
    """An argument lies outside the domain of an operation."""


class CapabilityError(ShrubError):
    """The instance exceeds a hard size cap of the implementation."""


class ContractViolation(ShrubError, AssertionError):
    """A documented precondition was violated by the caller."""
