"""Daily-case data handling: JHU-style CSV ingestion, differencing, smoothing.

The package works with two series representations:

- ``RawTimeSeries``: cumulative confirmed-case totals per calendar date, as
  parsed from the wide CSV layout used by the Johns Hopkins dashboard data
  (metadata columns, then one column per date in M/D/YY form).
- ``DailySeries``: daily new cases on a contiguous date grid. Index ``i`` of
  ``values`` corresponds to day ``t = i + 1``; ``origin_date`` is the calendar
  date of ``t = 1``. Fitting and forecasting use the ``t`` axis throughout.
"""

from __future__ import annotations

import csv
import datetime as dt
import difflib
import io
import logging
import urllib.request
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    ConfigurationError,
    CsvFormatError,
    CsvParseError,
    RegionNotFoundError,
)

log = logging.getLogger(__name__)


class SeriesKind(Enum):
    RAW = "raw"
    SMOOTHED = "smoothed"


class EdgePolicy(Enum):
    """How the centered moving average treats the first/last ``d`` days."""

    FULL_WINDOW_ONLY = "full-window-only"
    SHRINK_AT_EDGES = "shrink-at-edges"


@dataclass(frozen=True, eq=False)
class DailySeries:
    """Daily new-case counts on a contiguous date grid.

    ``values[i]`` is the count for day index ``t = i + 1``; ``origin_date``
    is the calendar date of ``t = 1``.
    """

    origin_date: dt.date
    values: np.ndarray
    kind: SeriesKind

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1:
            raise ConfigurationError("series values must be one-dimensional")
        if not np.all(np.isfinite(v)):
            raise ConfigurationError("series values must be finite")
        if v.size and v.min() < 0:
            raise ConfigurationError("series values must be nonnegative")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self) -> int:
        return self.values.size

    @property
    def dates(self) -> list[dt.date]:
        return [self.origin_date + dt.timedelta(days=i) for i in range(len(self))]

    @property
    def day_indices(self) -> np.ndarray:
        """The ``t`` values (1-based day indices) of this series."""
        return np.arange(1, len(self) + 1, dtype=float)


@dataclass(frozen=True, eq=False)
class RawTimeSeries:
    """Cumulative confirmed-case totals for one region, daily spacing."""

    region: str
    dates: tuple[dt.date, ...]
    cumulative: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.cumulative, dtype=float)
        if len(self.dates) != c.size:
            raise ConfigurationError("dates and cumulative counts differ in length")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if (cur - prev).days != 1:
                raise CsvFormatError(
                    f"dates must advance by exactly one day ({prev} -> {cur})"
                )
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "cumulative", c)


def _parse_header_date(cell: str) -> dt.date | None:
    try:
        return dt.datetime.strptime(cell.strip(), "%m/%d/%y").date()
    except ValueError:
        return None


def _norm(cell: str) -> str:
    return cell.strip().casefold().replace("_", "/")


def parse_timeseries_csv(data: bytes | str, region: str) -> RawTimeSeries:
    """Parse a wide cumulative-cases CSV and aggregate rows for one region.

    Parameters
    ----------
    data : bytes or str
        CSV content. The header must carry metadata columns (Province/State,
        Country/Region, ...) followed by one column per date in M/D/YY form.
        Both the global layout and the US layout (Province_State /
        Country_Region / Combined_Key) are accepted.
    region : str
        Selector matched case-insensitively against the country, province,
        or combined-key column. All matching rows (e.g. the provinces of a
        country) are summed per date.

    Raises
    ------
    RegionNotFoundError
        No row matched; the error lists close matches.
    CsvParseError
        A row is malformed (wrong width, non-numeric count); carries the
        1-based row number.
    CsvFormatError
        No date columns found, or the dates are not consecutive days.
    """
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    rows = list(csv.reader(io.StringIO(data)))
    if not rows:
        raise CsvFormatError("empty CSV")
    header = rows[0]

    date_start = None
    for j, cell in enumerate(header):
        if _parse_header_date(cell) is not None:
            date_start = j
            break
    if date_start is None or date_start == 0:
        raise CsvFormatError("no date columns of the form M/D/YY after metadata columns")

    dates = []
    for cell in header[date_start:]:
        d = _parse_header_date(cell)
        if d is None:
            raise CsvFormatError(f"non-date column {cell!r} among date columns")
        dates.append(d)
    for prev, cur in zip(dates, dates[1:]):
        if (cur - prev).days != 1:
            raise CsvFormatError(f"dates must advance by exactly one day ({prev} -> {cur})")

    meta = {_norm(cell): j for j, cell in enumerate(header[:date_start])}
    country_col = meta.get("country/region")
    province_col = meta.get("province/state")
    combined_col = meta.get("combined/key")
    if country_col is None and date_start >= 2:
        province_col, country_col = 0, 1

    sel = region.strip().casefold()
    total = np.zeros(len(dates))
    matched = False
    known: list[str] = []
    for i, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise CsvParseError(
                f"expected {len(header)} columns, found {len(row)}", row=i
            )
        cells = [row[c].strip() if c is not None and c < date_start else "" for c in (country_col, province_col, combined_col)]
        known.extend(c for c in cells if c)
        if sel not in (c.casefold() for c in cells if c):
            continue
        matched = True
        for j, cell in enumerate(row[date_start:]):
            try:
                value = float(cell)
            except ValueError:
                raise CsvParseError(f"non-numeric count {cell!r}", row=i) from None
            if value < 0:
                raise CsvParseError(f"negative cumulative count {cell!r}", row=i)
            total[j] += value

    if not matched:
        candidates = sorted(set(known))
        suggestions = difflib.get_close_matches(region, candidates, n=3)
        raise RegionNotFoundError(region, suggestions)
    return RawTimeSeries(region=region, dates=tuple(dates), cumulative=total)


def fetch_csv(url: str, timeout: float = 30.0) -> bytes:
    """Download a CSV by URL. Raises ``CsvFormatError`` on any network failure."""
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            return resp.read()
    except Exception as exc:
        raise CsvFormatError(f"could not fetch {url!r}: {exc}") from exc


def cumulative_to_daily(raw: RawTimeSeries) -> DailySeries:
    """Difference cumulative totals into daily new cases.

    ``values[0]`` is the first cumulative total itself. Negative increments
    (reporting revisions) are clamped to zero and logged as anomalies; the
    downstream moving average is relied on to absorb them.
    """
    c = raw.cumulative
    daily = np.empty_like(c)
    if c.size:
        daily[0] = c[0]
        daily[1:] = np.diff(c)
    for i in np.flatnonzero(daily < 0):
        log.warning(
            "negative daily increment for %s on %s (%g -> %g); clamped to 0",
            raw.region, raw.dates[i], c[i - 1], c[i],
        )
    return DailySeries(
        origin_date=raw.dates[0] if raw.dates else dt.date(1970, 1, 1),
        values=np.maximum(daily, 0.0),
        kind=SeriesKind.RAW,
    )


def moving_average(
    series: DailySeries,
    half_window: int = 3,
    policy: EdgePolicy = EdgePolicy.FULL_WINDOW_ONLY,
) -> DailySeries:
    """Two-sided moving average with a ``2·half_window + 1`` day window.

    The default window of 7 days cancels the weekly reporting periodicity.
    ``FULL_WINDOW_ONLY`` drops the first and last ``half_window`` days (the
    output's ``origin_date`` shifts accordingly); ``SHRINK_AT_EDGES`` averages
    over whatever part of the window is available, preserving length.
    """
    d = int(half_window)
    if d < 0:
        raise ConfigurationError("half_window must be >= 0")
    v = series.values
    n = v.size
    if policy is EdgePolicy.FULL_WINDOW_ONLY:
        if n <= 2 * d:
            raise ConfigurationError(
                f"series of length {n} too short for a {2 * d + 1}-day window"
            )
        width = 2 * d + 1
        out = np.array([v[i - d : i + d + 1].sum() / width for i in range(d, n - d)])
        origin = series.origin_date + dt.timedelta(days=d)
    else:
        out = np.array(
            [v[max(0, i - d) : i + d + 1].mean() for i in range(n)]
        ) if n else np.empty(0)
        origin = series.origin_date
    return DailySeries(origin_date=origin, values=out, kind=SeriesKind.SMOOTHED)


def train_validation_split(series: DailySeries, holdout: int) -> tuple[DailySeries, DailySeries]:
    """Split off the last ``holdout`` days as the validation set."""
    holdout = int(holdout)
    if holdout < 0:
        raise ConfigurationError("holdout must be >= 0")
    n = len(series)
    if holdout >= n:
        raise ConfigurationError(f"holdout of {holdout} days needs a series longer than that (got {n})")
    split = n - holdout
    train = DailySeries(series.origin_date, series.values[:split], series.kind)
    validation = DailySeries(
        series.origin_date + dt.timedelta(days=split),
        series.values[split:],
        series.kind,
    )
    return train, validation


def series_to_csv(series: DailySeries, comments: list[str] | None = None) -> str:
    """Serialize to the two-column CSV (ISO-8601 date, value) at full precision."""
    lines = [f"# {c}" for c in comments or []]
    lines.append("date,cases")
    for day, value in zip(series.dates, series.values):
        lines.append(f"{day.isoformat()},{float(value)!r}")
    return "\n".join(lines) + "\n"


def series_from_csv(text: str, kind: SeriesKind = SeriesKind.RAW) -> DailySeries:
    """Parse the two-column CSV written by :func:`series_to_csv`."""
    dates: list[dt.date] = []
    values: list[float] = []
    for i, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#") or line == "date,cases":
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise CsvParseError("expected two columns", row=i)
        try:
            dates.append(dt.date.fromisoformat(parts[0]))
            values.append(float(parts[1]))
        except ValueError as exc:
            raise CsvParseError(str(exc), row=i) from None
    if not dates:
        raise CsvFormatError("no data rows")
    for prev, cur in zip(dates, dates[1:]):
        if (cur - prev).days != 1:
            raise CsvFormatError(f"dates must advance by exactly one day ({prev} -> {cur})")
    return DailySeries(origin_date=dates[0], values=np.array(values), kind=kind)
