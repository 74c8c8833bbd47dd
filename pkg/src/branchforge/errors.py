"""Exception taxonomy shared by the whole package.

The CLI maps these onto exit codes: verification failures exit 1,
domain/precondition/configuration problems exit 2, resource caps exit 3.
"""


class BranchforgeError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(BranchforgeError):
    """An argument is outside the domain of the operation (bad point, level mismatch)."""


class PreconditionError(BranchforgeError):
    """A stated precondition does not hold for the given input."""


class ConfigurationError(BranchforgeError):
    """The request cannot be served with the configured horizon/spine/budget."""


class ResourceCapError(BranchforgeError):
    """A materialized domain or enumeration would exceed the configured cap."""

    def __init__(self, message: str, required: int | None = None, cap: int | None = None):
        super().__init__(message)
        self.required = required
        self.cap = cap


class VerificationError(BranchforgeError):
    """A mechanical check that was expected to succeed did not."""
