"""Synthetic daily index quotes for demos and tests (no real market data)."""

from __future__ import annotations

import csv
import datetime as dt

import numpy as np

from .series import DailyQuotes


def synthetic_quotes(
    first: dt.date = dt.date(2009, 1, 1),
    last: dt.date = dt.date(2019, 12, 31),
    level: float = 3000.0,
    seed: int = 0,
) -> DailyQuotes:
    """Weekday closes following a drifting log random walk with a mild annual cycle."""
    rng = np.random.default_rng(seed)
    days = np.arange(np.datetime64(first), np.datetime64(last) + 1)
    days = days[np.is_busday(days)]
    n = days.size
    steps = rng.normal(0.0005, 0.011, size=n)
    month = (days.astype("datetime64[M]").astype(int) % 12) + 1
    cycle = 0.02 * np.sin(2 * np.pi * (month - 1) / 12.0)
    closes = level * np.exp(np.cumsum(steps) + cycle)
    return DailyQuotes(tuple(d.item() for d in days), closes)


def write_quotes_csv(quotes: DailyQuotes, path, nse_dates: bool = False) -> None:
    fmt = "%d-%b-%Y" if nse_dates else "%Y-%m-%d"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["Date", "Open", "High", "Low", "Close"])
        for date, close in zip(quotes.dates, quotes.closes):
            c = f"{close:.2f}"
            writer.writerow([date.strftime(fmt), c, c, c, c])
