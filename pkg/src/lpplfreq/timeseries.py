"""Price ingestion, log conversion and linear detrending.

Time is the row index: calendar gaps (weekends, holidays) collapse to unit
steps, so a series of ``n`` daily closes is analysed on ``t = 0..n-1``.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from lpplfreq.errors import DataError

PRICE_HEADER = ["date", "close"]
SERIES_HEADER = ["t", "value"]


@dataclass(frozen=True)
class PriceSeries:
    dates: tuple[dt.date, ...]
    closes: np.ndarray

    def __post_init__(self):
        closes = np.asarray(self.closes, dtype=float)
        object.__setattr__(self, "closes", closes)
        if closes.ndim != 1 or len(closes) != len(self.dates):
            raise DataError("dates and closes must be 1-D and of equal length")
        if not np.all(np.isfinite(closes)) or np.any(closes <= 0):
            raise DataError("closes must be finite and strictly positive")
        for a, b in zip(self.dates, self.dates[1:]):
            if not a < b:
                raise DataError(f"dates not strictly increasing at {b.isoformat()}")

    def __len__(self):
        return len(self.closes)

    def __eq__(self, other):
        if not isinstance(other, PriceSeries):
            return NotImplemented
        return self.dates == other.dates and np.array_equal(self.closes, other.closes)

    __hash__ = None


@dataclass(frozen=True)
class LinearTrend:
    intercept: float
    slope: float

    def __call__(self, t):
        return self.intercept + self.slope * np.asarray(t, dtype=float)


def as_log_series(x, min_length: int = 2) -> np.ndarray:
    """Validate ``x`` as a finite 1-D float series of at least ``min_length`` samples."""
    values = np.asarray(x, dtype=float)
    if values.ndim != 1:
        raise DataError(f"series must be 1-D, got shape {values.shape}")
    if len(values) < min_length:
        raise DataError(f"series needs at least {min_length} samples, got {len(values)}")
    if not np.all(np.isfinite(values)):
        raise DataError("series contains non-finite values")
    return values


def load_csv(path) -> PriceSeries:
    """Read a ``date,close`` CSV of daily closing prices.

    Rows are sorted by date. Duplicate dates and non-positive closes are
    rejected with the offending line number.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    reader = csv.reader(text.splitlines())
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != PRICE_HEADER:
        raise DataError(f"{path}:1: expected header 'date,close', got {header!r}")

    rows: dict[dt.date, tuple[float, int]] = {}
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise DataError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
        try:
            day = dt.date.fromisoformat(row[0].strip())
            close = float(row[1])
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: {exc}") from exc
        if not np.isfinite(close) or close <= 0:
            raise DataError(f"{path}:{lineno}: close must be positive, got {row[1].strip()}")
        if day in rows:
            raise DataError(
                f"{path}:{lineno}: duplicate date {day.isoformat()} (first seen on line {rows[day][1]})"
            )
        rows[day] = (close, lineno)

    if not rows:
        raise DataError(f"{path}: no data rows")
    dates = tuple(sorted(rows))
    return PriceSeries(dates, np.array([rows[d][0] for d in dates]))


def write_csv(path, prices: PriceSeries) -> None:
    # repr() round-trips floats exactly
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PRICE_HEADER)
        for day, close in zip(prices.dates, prices.closes):
            writer.writerow([day.isoformat(), repr(float(close))])


def write_series_csv(path, values) -> None:
    """Write a unit-step series (log-prices, noise, filtered output) as ``t,value``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SERIES_HEADER)
        for t, v in enumerate(np.asarray(values, dtype=float)):
            writer.writerow([t, repr(float(v))])


def read_series_csv(path) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != SERIES_HEADER:
            raise DataError(f"{path}:1: expected header 't,value', got {header!r}")
        values = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                values.append(float(row[1]))
            except (IndexError, ValueError) as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
    return as_log_series(values, min_length=1)


def to_log_series(prices: PriceSeries) -> np.ndarray:
    return np.log(prices.closes)


def linear_detrend(x) -> tuple[np.ndarray, LinearTrend]:
    """Remove the ordinary least-squares line over ``t = 0..n-1``.

    Returns the residual and the fitted trend. The fit is done on centred
    time so the normal equations stay well conditioned for long series.
    """
    x = as_log_series(x)
    n = len(x)
    t_mean = (n - 1) / 2.0
    tc = np.arange(n, dtype=float) - t_mean
    x_mean = x.mean()
    slope = float(np.dot(tc, x - x_mean) / np.dot(tc, tc))
    intercept = float(x_mean - slope * t_mean)
    return (x - x_mean) - slope * tc, LinearTrend(intercept, slope)
