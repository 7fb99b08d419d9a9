"""Calendar-indexed monthly series, daily quote ingestion and differencing."""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, DataError, GapError, LengthError, ParseError

Period = tuple[int, int]

_DATE_FORMATS = ("%Y-%m-%d", "%d-%b-%Y")


def _frozen_array(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def parse_period(text: str) -> Period:
    """Parse ``YYYY-MM`` into a ``(year, month)`` tuple."""
    try:
        year, month = text.strip().split("-")
        period = (int(year), int(month))
    except ValueError:
        raise ConfigError(f"bad period {text!r}, expected YYYY-MM") from None
    if not 1 <= period[1] <= 12:
        raise ConfigError(f"bad period {text!r}, month out of range")
    return period


def format_period(period: Period) -> str:
    return f"{period[0]:04d}-{period[1]:02d}"


@dataclass(frozen=True)
class TimeSeries:
    """Contiguous real-valued series indexed by (year, period-of-year).

    ``values`` is stored as a read-only float array; the index is implied by
    ``start`` and ``periods_per_year``, so gaps cannot be represented.
    """

    values: np.ndarray
    start: Period
    periods_per_year: int = 12

    def __post_init__(self):
        values = _frozen_array(self.values)
        if values.ndim != 1 or values.size == 0:
            raise LengthError("a series needs at least one value")
        if not np.all(np.isfinite(values)):
            raise DataError("series contains NaN or infinite values")
        if self.periods_per_year < 1:
            raise ConfigError("periods_per_year must be positive")
        if not 1 <= self.start[1] <= self.periods_per_year:
            raise ConfigError(f"start period {self.start} out of range")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "start", (int(self.start[0]), int(self.start[1])))

    def __len__(self) -> int:
        return self.values.size

    def period_at(self, i: int) -> Period:
        if i < 0:
            i += len(self)
        ppy = self.periods_per_year
        k = self.start[0] * ppy + self.start[1] - 1 + i
        return (k // ppy, k % ppy + 1)

    def index_of(self, period: Period) -> int:
        """Offset of ``period`` relative to ``start``; may fall outside the span."""
        ppy = self.periods_per_year
        return (period[0] - self.start[0]) * ppy + (period[1] - self.start[1])

    @property
    def end(self) -> Period:
        return self.period_at(len(self) - 1)

    def periods(self) -> list[Period]:
        return [self.period_at(i) for i in range(len(self))]

    def head(self, n: int) -> "TimeSeries":
        return TimeSeries(self.values[:n], self.start, self.periods_per_year)

    def window(self, first: Period, last: Period) -> "TimeSeries":
        """Sub-series covering ``first..last`` inclusive."""
        i, j = self.index_of(first), self.index_of(last)
        if i < 0 or j >= len(self) or j < i:
            raise ConfigError(
                f"window {format_period(first)}..{format_period(last)} is outside "
                f"{format_period(self.start)}..{format_period(self.end)}"
            )
        return TimeSeries(self.values[i : j + 1], first, self.periods_per_year)

    def with_values(self, values) -> "TimeSeries":
        return TimeSeries(values, self.start, self.periods_per_year)


@dataclass(frozen=True)
class DailyQuotes:
    dates: tuple[dt.date, ...]
    closes: np.ndarray = field(repr=False)

    def __post_init__(self):
        closes = _frozen_array(self.closes)
        dates = tuple(self.dates)
        if len(dates) != closes.size:
            raise DataError("dates and closes differ in length")
        for prev, cur in zip(dates, dates[1:]):
            if cur <= prev:
                raise DataError(f"dates not strictly increasing at {cur.isoformat()}")
        bad = np.flatnonzero(~(closes > 0))
        if bad.size:
            raise DataError(f"non-positive close on {dates[bad[0]].isoformat()}")
        object.__setattr__(self, "dates", dates)
        object.__setattr__(self, "closes", closes)

    def __len__(self) -> int:
        return len(self.dates)


def _parse_date(text: str) -> dt.date:
    text = text.strip()
    for fmt in _DATE_FORMATS:
        try:
            return dt.datetime.strptime(text, fmt).date()
        except ValueError:
            continue
    raise ValueError(f"unrecognised date {text!r}")


def read_quotes_csv(path, date_column: str = "Date", close_column: str = "Close") -> DailyQuotes:
    """Read daily closes from a CSV with a header row.

    Dates may be ISO (``2019-01-31``) or NSE style (``31-Jan-2019``). Column
    names are matched after stripping whitespace, since NSE exports pad them.
    """
    dates: list[dt.date] = []
    closes: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError("empty file, header row required", line=1) from None
        try:
            di, ci = header.index(date_column), header.index(close_column)
        except ValueError:
            raise ParseError(
                f"header must contain {date_column!r} and {close_column!r}, got {header}", line=1
            ) from None
        for row in reader:
            line = reader.line_num
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                date_text, close_text = row[di], row[ci]
            except IndexError:
                raise ParseError("row has too few columns", line=line) from None
            try:
                date = _parse_date(date_text)
            except ValueError as exc:
                raise ParseError(str(exc), line=line) from None
            try:
                close = float(close_text.strip().replace(",", ""))
            except ValueError:
                raise ParseError(f"non-numeric close {close_text!r}", line=line) from None
            if dates and date <= dates[-1]:
                raise ParseError(f"date {date.isoformat()} is not after the previous row", line=line)
            if not close > 0:
                raise ParseError(f"close must be positive, got {close}", line=line)
            dates.append(date)
            closes.append(close)
    if not dates:
        raise DataError(f"{path}: no data rows")
    return DailyQuotes(tuple(dates), np.asarray(closes))


def resample_monthly_mean(quotes: DailyQuotes) -> TimeSeries:
    """Average the closes of each calendar month.

    Every month between the first and last quote must have at least one
    quote; missing months raise :class:`GapError` instead of being filled.
    """
    if len(quotes) == 0:
        raise DataError("no quotes to resample")
    sums: dict[Period, float] = {}
    counts: dict[Period, int] = {}
    for date, close in zip(quotes.dates, quotes.closes):
        key = (date.year, date.month)
        sums[key] = sums.get(key, 0.0) + float(close)
        counts[key] = counts.get(key, 0) + 1
    first, last = min(sums), max(sums)
    n = (last[0] - first[0]) * 12 + last[1] - first[1] + 1
    out = np.empty(n)
    for i in range(n):
        k = first[0] * 12 + first[1] - 1 + i
        key = (k // 12, k % 12 + 1)
        if key not in counts:
            raise GapError(f"no quotes in {format_period(key)}")
        out[i] = sums[key] / counts[key]
    return TimeSeries(out, first, 12)


def read_series_csv(path) -> TimeSeries:
    """Read a normalized ``period,value`` monthly series."""
    periods: list[Period] = []
    values: list[float] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or {"period", "value"} - set(reader.fieldnames):
            raise ParseError("series CSV needs 'period' and 'value' columns", line=1)
        for row in reader:
            line = reader.line_num
            try:
                periods.append(parse_period(row["period"]))
                values.append(float(row["value"]))
            except (ConfigError, ValueError, TypeError) as exc:
                raise ParseError(str(exc), line=line) from None
    if not periods:
        raise DataError(f"{path}: no data rows")
    series = TimeSeries(np.asarray(values), periods[0])
    for i, period in enumerate(periods):
        if series.period_at(i) != period:
            raise GapError(f"expected {format_period(series.period_at(i))}, found {format_period(period)}")
    return series


def write_series_csv(series: TimeSeries, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["period", "value"])
        for period, value in zip(series.periods(), series.values):
            writer.writerow([format_period(period), repr(float(value))])


def looks_like_series_csv(path) -> bool:
    with open(path, newline="") as fh:
        header = fh.readline()
    return [h.strip() for h in header.split(",")][:2] == ["period", "value"]


def load_series(path, date_column: str = "Date", close_column: str = "Close") -> TimeSeries:
    """Load either a normalized series CSV or a daily quotes CSV."""
    path = Path(path)
    if looks_like_series_csv(path):
        return read_series_csv(path)
    return resample_monthly_mean(read_quotes_csv(path, date_column, close_column))


def _as_values(s) -> np.ndarray:
    return np.asarray(s.values if isinstance(s, TimeSeries) else s, dtype=float)


def differencing_polynomial(d: int, D: int, m: int) -> np.ndarray:
    """Coefficients of (1 - B)^d (1 - B^m)^D in ascending powers of B."""
    poly = np.array([1.0])
    for _ in range(d):
        poly = np.convolve(poly, [1.0, -1.0])
    seasonal = np.zeros(m + 1)
    seasonal[0], seasonal[m] = 1.0, -1.0
    for _ in range(D):
        poly = np.convolve(poly, seasonal)
    return poly


def _check_orders(d: int, D: int, m: int) -> None:
    if d < 0 or D < 0:
        raise ConfigError("differencing orders must be non-negative")
    if m < 1:
        raise ConfigError("season length must be positive")


def difference(s, d: int, D: int = 0, m: int = 12, seasonal_first: bool = True) -> np.ndarray:
    """Apply (1 - B)^d (1 - B^m)^D.

    Output length is ``len(s) - d - D*m``. The operators commute, so
    ``seasonal_first`` only changes the evaluation order, never the result.
    """
    _check_orders(d, D, m)
    x = _as_values(s)
    if x.size <= d + D * m:
        raise LengthError(f"series of length {x.size} too short for d={d}, D={D}, m={m}")
    steps = [m] * D + [1] * d if seasonal_first else [1] * d + [m] * D
    for lag in steps:
        x = x[lag:] - x[:-lag]
    return x


def integrate(diff, d: int, D: int, m: int, head) -> np.ndarray:
    """Invert :func:`difference` given the ``d + D*m`` leading original values."""
    _check_orders(d, D, m)
    head = np.asarray(head, dtype=float)
    n_head = d + D * m
    if head.shape != (n_head,):
        raise LengthError(f"head must hold exactly {n_head} values, got {head.size}")
    poly = differencing_polynomial(d, D, m)
    diff = np.asarray(diff, dtype=float)
    out = np.empty(n_head + diff.size)
    out[:n_head] = head
    lags = np.flatnonzero(poly[1:]) + 1
    coefs = poly[lags]
    for i, w in enumerate(diff):
        t = n_head + i
        out[t] = w - np.dot(coefs, out[t - lags])
    return out


def split(s: TimeSeries, boundary: Period) -> tuple[TimeSeries, TimeSeries]:
    """Cut ``s`` so the right-hand part starts at ``boundary``."""
    i = s.index_of(boundary)
    if i <= 0 or i >= len(s):
        raise ConfigError(
            f"split point {format_period(boundary)} must fall strictly inside "
            f"{format_period(s.start)}..{format_period(s.end)}"
        )
    return (
        TimeSeries(s.values[:i], s.start, s.periods_per_year),
        TimeSeries(s.values[i:], boundary, s.periods_per_year),
    )


def concat(parts: Sequence[TimeSeries] | Iterable[TimeSeries]) -> TimeSeries:
    parts = list(parts)
    for a, b in zip(parts, parts[1:]):
        if b.start != a.period_at(len(a)):
            raise GapError("series are not adjacent")
    return TimeSeries(np.concatenate([p.values for p in parts]), parts[0].start, parts[0].periods_per_year)
