"""Exception types shared across the package."""

from __future__ import annotations


class TraceLayoutError(Exception):
    """Base class for all errors raised by this package."""


class InstanceParseError(TraceLayoutError):
    """Raised when instance XML is malformed or not the accepted dialect."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class InstanceIntegrityError(TraceLayoutError):
    """Raised when parsed XML is well formed but internally inconsistent."""


class OrderingError(TraceLayoutError):
    """Raised when an ordering field does not describe a linear chain."""


class SpecError(TraceLayoutError):
    """Raised when a layout specification cannot be parsed."""


class SpecValidationError(TraceLayoutError):
    """Raised when a layout specification fails validation against an instance."""


class ProjectionError(TraceLayoutError):
    """Raised when a projection request names a sig or atom incorrectly."""


class LayoutError(TraceLayoutError):
    """Raised when a scene cannot be laid out (anchor cycles, bad parameters)."""


class TransitionError(TraceLayoutError):
    """Raised when a transition plan cannot be built from a scene pair."""


class BundleError(TraceLayoutError):
    """Raised when bundle content violates the bundle schema."""
