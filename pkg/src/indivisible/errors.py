"""Exception types shared across the package."""

from __future__ import annotations

from typing import Any


class ValidationError(ValueError):
    """An object failed its structural invariants.

    ``details`` carries machine-readable context (offending columns, residuals,
    dimensions) so callers can emit structured reports instead of parsing the
    message string.
    """

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.details = dict(details)


class DomainError(ValidationError):
    """A map produced a value outside its declared configuration space."""


class IntegrationError(RuntimeError):
    """Integration aborted; ``step`` is the index of the offending step."""

    def __init__(self, message: str, step: int):
        super().__init__(message)
        self.step = step


class UnsupportedSizeError(ValueError):
    """The requested dimension is outside the range an algorithm supports."""


class NotRankOneError(ValueError):
    """Density matrix has more than one significant eigenvalue.

    The full eigenvalue spectrum (ascending) is attached for diagnostics.
    """

    def __init__(self, message: str, spectrum):
        super().__init__(message)
        self.spectrum = spectrum


class InputFormatError(ValueError):
    """A JSON input file is malformed; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.reason = message
