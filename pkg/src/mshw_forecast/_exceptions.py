"""
Custom exceptions for mshw-forecast.

Library code raises these; the command-line entry point maps them to
process exit codes with `exit_code_for`.
"""

from __future__ import annotations

from typing import Optional

# Process exit codes used by the CLI
EXIT_OK = 0
EXIT_BAD_CONFIG = 2
EXIT_INPUT_ERROR = 3


class ForecastError(Exception):
    """Base exception for all mshw-forecast errors."""

    def __init__(
        self,
        message: str,
        *,
        code: Optional[str] = None,
        details: Optional[str] = None,
    ):
        self.message = message
        self.code = code
        self.details = details
        super().__init__(message)

    def __str__(self) -> str:
        parts = [self.message]
        if self.code:
            parts.append(f"code={self.code}")
        if self.details:
            parts.append(f"details={self.details}")
        return " | ".join(parts)


class InsufficientHistoryError(ForecastError):
    """Raised when a series is too short for the requested operation."""

    pass


class DegenerateWindowError(ForecastError):
    """Raised when a centered moving average is not positive."""

    pass


class DuplicateCycleError(ForecastError):
    """Raised when a seasonal cycle length is already active in a model."""

    pass


class LagTooLargeError(ForecastError):
    """Raised when an autocorrelation lag does not fit inside the series."""

    pass


class EmptyInputError(ForecastError):
    """Raised when a metric or aggregation receives no data."""

    pass


class EmptyReportError(ForecastError):
    """Raised when a run report has no forecast records to write."""

    pass


class ConfigError(ForecastError):
    """Raised when options are inconsistent or out of range."""

    pass


class InputError(ForecastError):
    """Raised when an input or output path cannot be read or written."""

    pass


def exit_code_for(error: BaseException) -> int:
    """
    Map an exception to a CLI exit code.

    Args:
        error: The exception raised while running the pipeline.

    Returns:
        EXIT_BAD_CONFIG for configuration problems, EXIT_INPUT_ERROR for
        unreadable or unusable input, and 1 for anything unexpected.
    """
    from pydantic import ValidationError

    if isinstance(error, (ConfigError, ValidationError)):
        return EXIT_BAD_CONFIG
    if isinstance(
        error,
        (InputError, InsufficientHistoryError, EmptyInputError, DegenerateWindowError),
    ):
        return EXIT_INPUT_ERROR
    if isinstance(error, OSError):
        return EXIT_INPUT_ERROR
    return 1
