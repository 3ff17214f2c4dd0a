"""Exception types shared across the package."""


class RobustLabError(Exception):
    """Base class for all domain errors raised by robustlab."""


class DimensionError(RobustLabError, ValueError):
    """Incompatible or out-of-range dimensions."""


class ParseError(RobustLabError, ValueError):
    """Malformed text input; carries a 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class PreconditionError(RobustLabError, ValueError):
    """A documented precondition was violated; the message names it."""


class BudgetExceededError(RobustLabError, RuntimeError):
    """An enumeration budget would be exceeded; the caller must decide."""
