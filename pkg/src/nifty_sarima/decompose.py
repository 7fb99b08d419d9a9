"""Classical additive decomposition: trend + seasonal + residual."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LengthError
from .series import TimeSeries


@dataclass(frozen=True)
class DecompositionResult:
    """Aligned components; ``trend`` and ``residual`` are NaN where masked."""

    observed: np.ndarray
    trend: np.ndarray
    seasonal: np.ndarray
    residual: np.ndarray
    period: int

    @property
    def defined(self) -> np.ndarray:
        return ~np.isnan(self.trend)


def centered_moving_average(x: np.ndarray, m: int) -> np.ndarray:
    """m-point centered MA (2 x m for even m); NaN at the m//2 edge points."""
    if m % 2:
        weights = np.full(m, 1.0 / m)
    else:
        weights = np.full(m + 1, 1.0 / m)
        weights[0] = weights[-1] = 0.5 / m
    half = len(weights) // 2
    out = np.full(x.size, np.nan)
    if x.size >= len(weights):
        out[half : x.size - half] = np.convolve(x, weights, mode="valid")
    return out


def classical_decompose(s: TimeSeries, m: int | None = None) -> DecompositionResult:
    m = s.periods_per_year if m is None else m
    x = np.asarray(s.values, dtype=float)
    if m < 2:
        raise LengthError("season length must be at least 2")
    if x.size < 2 * m:
        raise LengthError(f"need at least two full periods ({2 * m} points), got {x.size}")

    trend = centered_moving_average(x, m)
    detrended = x - trend
    # index seasons by position in the series so that pattern[0] aligns with x[0]
    pattern = np.array([np.nanmean(detrended[j::m]) for j in range(m)])
    pattern -= pattern.mean()
    seasonal = np.resize(pattern, x.size)
    residual = x - trend - seasonal
    return DecompositionResult(x.copy(), trend, seasonal, residual, m)
