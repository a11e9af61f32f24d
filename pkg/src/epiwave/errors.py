"""Exception types shared across the package."""

from __future__ import annotations


class EpiwaveError(Exception):
    """Base class for all package errors."""


class ConfigurationError(EpiwaveError, ValueError):
    """An argument or option violates a documented precondition."""


class CsvParseError(EpiwaveError):
    """A CSV byte stream could not be parsed.

    `row` is the 1-based row number of the offending line, when known.
    """

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


class CsvFormatError(EpiwaveError):
    """The CSV parsed but violates the expected layout (e.g. dates not daily)."""


class RegionNotFoundError(EpiwaveError):
    """No row matched the requested region selector.

    `suggestions` lists close matches among the known region names.
    """

    def __init__(self, selector: str, suggestions: list[str]):
        hint = f" (close matches: {', '.join(suggestions)})" if suggestions else ""
        super().__init__(f"region not found: {selector!r}{hint}")
        self.selector = selector
        self.suggestions = suggestions


class UndefinedMetricError(EpiwaveError, ValueError):
    """The validation metric is undefined for the given inputs."""


class SolverFailureError(EpiwaveError):
    """The optimizer could not continue; carries the best-so-far report."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class FitFailureError(EpiwaveError):
    """Every multi-start attempt failed; carries the per-start errors."""

    def __init__(self, message: str, start_errors=None):
        super().__init__(message)
        self.start_errors = list(start_errors or [])
