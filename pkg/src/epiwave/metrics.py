"""Holdout validation metric: per-day relative percentage difference.

A prediction for day ``i`` is scored against the *smoothed* actual value as
``err_i = |y_i - yhat_i| / y_i``. Errors are kept as dimensionless fractions
internally; the CLI formats them as percentages with two decimals.
"""

from __future__ import annotations

import datetime as dt
import logging
from dataclasses import dataclass

from .errors import ConfigurationError, UndefinedMetricError

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ValidationRow:
    day: dt.date
    actual: float       # smoothed actual, cases/day
    predicted: float    # model prediction, cases/day
    error: float        # |actual - predicted| / actual, dimensionless


def relative_percentage_difference(actual: float, predicted: float) -> float:
    """``|actual - predicted| / actual``; undefined for ``actual <= 0``."""
    if actual <= 0:
        raise UndefinedMetricError(f"metric undefined for actual value {actual}")
    return float(abs(actual - predicted) / actual)


def make_validation_rows(dates, actual, predicted) -> list[ValidationRow]:
    """Score predictions day by day.

    Days whose smoothed actual value is zero are excluded with a warning:
    the metric is undefined there and treating them as infinite error would
    swamp the mean.
    """
    if not (len(dates) == len(actual) == len(predicted)):
        raise ConfigurationError("dates, actual and predicted must be equally long")
    rows = []
    for day, y, y_hat in zip(dates, actual, predicted):
        if y <= 0:
            log.warning("excluding %s from validation: smoothed actual is %g", day, y)
            continue
        rows.append(ValidationRow(day=day, actual=float(y), predicted=float(y_hat),
                                  error=relative_percentage_difference(y, y_hat)))
    return rows


def mean_validation_error(rows: list[ValidationRow]) -> float:
    """Arithmetic mean of the per-day errors (fraction, not percent)."""
    if not rows:
        raise ConfigurationError("cannot average an empty validation table")
    return float(sum(r.error for r in rows)) / len(rows)


def validation_table_csv(rows: list[ValidationRow], raw_values, comments: list[str] | None = None) -> str:
    """Five-column CSV: date, reported, smoothed, predicted, error (percent, 2 decimals)."""
    if len(raw_values) != len(rows):
        raise ConfigurationError("raw_values must align with the validation rows")
    lines = [f"# {c}" for c in comments or []]
    lines.append("date,reported,smoothed,predicted,error_pct")
    for row, raw in zip(rows, raw_values):
        lines.append(
            f"{row.day.isoformat()},{float(raw)!r},{row.actual!r},{row.predicted!r},{100.0 * row.error:.2f}"
        )
    return "\n".join(lines) + "\n"
