"""
Error types raised by the carddl toolkit.

Every error derives from CarddlError so callers at the command boundary can
map failures onto exit codes without inspecting messages.
"""

from typing import Optional


class CarddlError(Exception):
    """Base class for all toolkit errors."""


class ParseError(CarddlError):
    """
    Malformed input text.

    Attributes:
        line: 1-based line of the offending token
        column: 1-based column of the offending token
    """

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.line = line
        self.column = column
        super().__init__(f"{message} at line {line}, column {column}" if line else message)


class SignatureError(CarddlError):
    """A name is used in two categories, or outside the categories allowed where it occurs."""


class DialectError(CarddlError):
    """A concept uses a constructor the requested dialect does not provide."""


class InvalidInputError(CarddlError):
    """Structurally valid input that the requested operation cannot accept."""


class ResourceExceeded(CarddlError):
    """
    A configured cap was hit, or the solver gave up.

    Attributes:
        cap: name of the configuration field that was exceeded, if any
    """

    def __init__(self, message: str, cap: Optional[str] = None):
        self.cap = cap
        super().__init__(message)


class ModelError(CarddlError):
    """A constructed interpretation failed its own audit."""
