"""
Errors - Exception hierarchy shared by every design module

Precondition violations raise; verification failures never do (they come
back as reports with witnesses).
"""

from typing import TYPE_CHECKING, Optional, Tuple

if TYPE_CHECKING:
    from src.core.models import VerificationReport


class SoaError(Exception):
    """Base exception for all design errors."""
    pass


class ParameterError(SoaError, ValueError):
    """Raised when inputs violate an operation's preconditions."""
    pass


class ConstructionError(SoaError):
    """
    Raised when a construction cannot complete.

    Attributes:
        report: Verification report whose witness explains the failure, if any
        child: (column, level) of the child array that blocked the build, if any
    """

    def __init__(
        self,
        message: str,
        report: Optional["VerificationReport"] = None,
        child: Optional[Tuple[int, int]] = None,
    ) -> None:
        super().__init__(message)
        self.report = report
        self.child = child


class ArrayParseError(SoaError):
    """Raised when an array file is malformed."""

    def __init__(self, message: str, line: int) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line
