"""Exception types shared by all topophase modules."""


class TopophaseError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(TopophaseError, ValueError):
    """An input violates a precondition (bad parameter, malformed file)."""


class InvariantError(TopophaseError, RuntimeError):
    """An internal consistency check failed. Indicates a bug, never bad input."""
