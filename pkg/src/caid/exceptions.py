"""Exception types shared across the package."""


class CapacityError(Exception):
    """An operation would exceed an explicit enumeration or search budget."""


class ParseError(ValueError):
    """An observation file is malformed. Carries the 1-based offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class UsageError(ValueError):
    """Bad command-line flags or configuration keys."""
