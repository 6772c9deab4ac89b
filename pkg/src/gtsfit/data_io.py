"""Price ingestion, percent log-returns, outlier filters, moment summaries.

Returns are reported in percent (100 ln S_j/S_{j-1}); daily equity
variances near 1 in these units. Central moments use denominator m
(method of moments) and kurtosis is the full m4/m2^2, not excess.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import date
from typing import NamedTuple, Tuple

import numpy as np

from .errors import DataError, DomainError


@dataclass(frozen=True)
class PriceSeries:
    """Positive prices on strictly increasing dates."""

    dates: Tuple[date, ...]
    prices: np.ndarray

    def __post_init__(self):
        p = np.array(self.prices, dtype=float)
        if len(self.dates) != p.size:
            raise DataError("dates and prices must align")
        if p.size == 0:
            raise DataError("empty price series")
        if not np.all(np.isfinite(p)) or np.any(p <= 0.0):
            raise DataError("prices must be finite and positive")
        if any(b <= a for a, b in zip(self.dates, self.dates[1:])):
            raise DataError("dates must be strictly increasing")
        p.flags.writeable = False
        object.__setattr__(self, "prices", p)
        object.__setattr__(self, "dates", tuple(self.dates))

    def __len__(self) -> int:
        return self.prices.size


@dataclass(frozen=True)
class ReturnSeries:
    """Percent log returns; each value dated by the later of its two prices."""

    values: np.ndarray
    source_dates: Tuple[date, ...] = ()

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.ndim != 1:
            raise DataError("returns must be 1-d")
        if not np.all(np.isfinite(v)):
            raise DataError("returns must be finite")
        if self.source_dates and len(self.source_dates) != v.size:
            raise DataError("dates and returns must align")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "source_dates", tuple(self.source_dates))

    def __len__(self) -> int:
        return self.values.size


def load_prices(path, date_column: str = "date", price_column: str = "price") -> PriceSeries:
    """Read a CSV with a header; rows sorted by date, duplicates rejected."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or date_column not in reader.fieldnames:
            raise DataError(f"{path}: missing column {date_column!r}")
        if price_column not in reader.fieldnames:
            raise DataError(f"{path}: missing column {price_column!r}")
        rows = []
        for lineno, rec in enumerate(reader, start=2):
            raw_d = (rec.get(date_column) or "").strip()
            raw_p = (rec.get(price_column) or "").strip()
            try:
                d = date.fromisoformat(raw_d)
            except ValueError as exc:
                raise DataError(f"{path} row {lineno}: bad date {raw_d!r}") from exc
            try:
                p = float(raw_p)
            except ValueError as exc:
                raise DataError(f"{path} row {lineno}: bad price {raw_p!r}") from exc
            if not math.isfinite(p) or p <= 0.0:
                raise DataError(f"{path} row {lineno}: price must be positive, got {raw_p}")
            rows.append((d, p, lineno))
    if not rows:
        raise DataError(f"{path}: no data rows")
    rows.sort(key=lambda t: t[0])
    for (d1, _, l1), (d2, _, l2) in zip(rows, rows[1:]):
        if d1 == d2:
            raise DataError(f"{path} rows {l1} and {l2}: duplicate date {d1}")
    return PriceSeries(tuple(r[0] for r in rows), np.array([r[1] for r in rows]))


def log_returns(s: PriceSeries) -> ReturnSeries:
    """100 ln(S_j / S_{j-1}), length one less than the price series."""
    if len(s) < 2:
        raise DataError("need at least two prices for returns")
    vals = 100.0 * np.diff(np.log(s.prices))
    return ReturnSeries(vals, s.dates[1:])


@dataclass(frozen=True)
class AbsThreshold:
    """Drop returns with |y| > cutoff."""

    cutoff: float

    def __post_init__(self):
        if not (self.cutoff > 0.0):
            raise DomainError("outlier cutoff must be positive")


@dataclass(frozen=True)
class SigmaMultiple:
    """Drop returns beyond k sample standard deviations of the mean,
    with mean and sd computed once on the unfiltered series."""

    k: float

    def __post_init__(self):
        if not (self.k > 0.0):
            raise DomainError("sigma multiple must be positive")


def remove_outliers(r: ReturnSeries, policy):
    """Apply one filtering pass; returns (kept series, removed indices)."""
    y = r.values
    if isinstance(policy, AbsThreshold):
        drop = np.abs(y) > policy.cutoff
    elif isinstance(policy, SigmaMultiple):
        mu = y.mean()
        sd = y.std()
        drop = np.abs(y - mu) > policy.k * sd
    else:
        raise DomainError(f"unknown outlier policy {policy!r}")
    if drop.all():
        raise DataError("outlier filter removed every return")
    removed = np.nonzero(drop)[0]
    dates = tuple(d for d, gone in zip(r.source_dates, drop) if not gone) if r.source_dates else ()
    return ReturnSeries(y[~drop], dates), removed


class SummaryStats(NamedTuple):
    m: int
    mean: float
    variance: float
    skewness: float
    kurtosis: float


def summary_stats(r) -> SummaryStats:
    """Method-of-moments summary: denominator m, full (not excess) kurtosis."""
    y = r.values if isinstance(r, ReturnSeries) else np.asarray(r, dtype=float)
    m = y.size
    if m < 2:
        raise DataError("summary statistics need m >= 2")
    mean = y.mean()
    c = y - mean
    m2 = float(np.mean(c * c))
    if m2 <= 0.0:
        raise DataError("zero variance; statistics undefined")
    m3 = float(np.mean(c**3))
    m4 = float(np.mean(c**4))
    return SummaryStats(
        m=int(m),
        mean=float(mean),
        variance=m2,
        skewness=m3 / m2**1.5,
        kurtosis=m4 / m2**2,
    )
