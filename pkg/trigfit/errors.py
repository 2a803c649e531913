"""Exceptions raised by the trigfit library.

Every error carries the process exit code that the command layer maps it to:
1 usage/config, 2 data, 3 non-convergence.
"""

from __future__ import annotations

from typing import Optional


class TrigFitError(Exception):
    """Base class for all library errors."""

    exit_code: int = 1

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class InvalidInputError(TrigFitError, ValueError):
    """The sampled signal violates a precondition (N < 2, unsorted, non-finite)."""

    exit_code = 2


class DegenerateInputError(InvalidInputError):
    """The condition range has zero width (x_N == x_1)."""


class DataFormatError(InvalidInputError):
    """A CSV file could not be parsed into a signal."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class InvalidConfigError(TrigFitError, ValueError):
    """A configuration value is out of range."""

    exit_code = 1


class FitError(TrigFitError, RuntimeError):
    """The least-squares refinement could not start or produced no usable result."""

    exit_code = 3
