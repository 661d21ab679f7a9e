"""Exception hierarchy shared by every module.

The CLI maps any :class:`ComputationError` to a structured JSON error and
exit status 1.
"""


class ComputationError(Exception):
    """Base class for failures of a well-formed request."""


class UnsupportedError(ComputationError, NotImplementedError):
    pass


class ResourceError(ComputationError):
    """A desk-scale cap (enumeration size, conductor, sieve bound) was exceeded."""


class DomainError(ComputationError, ValueError):
    pass


class InapplicableError(ComputationError):
    """The requested criterion does not apply to this input."""
