"""Point forecasts with Gaussian intervals, and rolling one-step backtests."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats

from .errors import ConfigError, LengthError
from .sarima import (
    MIN_EXTRA_OBS,
    FitResult,
    ModelOrder,
    _filter,
    expand_polynomials,
    fit,
    process_mean,
)
from .series import Period, TimeSeries, difference, differencing_polynomial, format_period


@dataclass(frozen=True)
class ForecastResult:
    origin: Period
    horizon: int
    point: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    level: float
    sd: np.ndarray
    periods_per_year: int = 12

    def periods(self) -> list[Period]:
        base = TimeSeries([0.0], self.origin, self.periods_per_year)
        return [base.period_at(j) for j in range(1, self.horizon + 1)]

    def rows(self) -> list[dict]:
        return [
            {"period": format_period(per), "point": float(p), "lo": float(lo), "hi": float(hi)}
            for per, p, lo, hi in zip(self.periods(), self.point, self.lo, self.hi)
        ]


def psi_weights(ar_poly, ma_poly, n: int) -> np.ndarray:
    """First ``n`` coefficients of ma_poly(B) / ar_poly(B) (both with leading 1)."""
    ar_poly = np.asarray(ar_poly, dtype=float)
    ma_poly = np.asarray(ma_poly, dtype=float)
    psi = np.zeros(n)
    for j in range(n):
        acc = ma_poly[j] if j < ma_poly.size else 0.0
        for k in range(1, min(j, ar_poly.size - 1) + 1):
            acc -= ar_poly[k] * psi[j - k]
        psi[j] = acc
    return psi


def _integrated_operators(f: FitResult) -> tuple[np.ndarray, np.ndarray]:
    full_ar, full_ma = expand_polynomials(f.order, f.params)
    o = f.order
    ar_poly = np.convolve(np.r_[1.0, -full_ar], differencing_polynomial(o.d, o.D, o.m))
    return ar_poly, np.r_[1.0, full_ma]


def forecast(f: FitResult, s: TimeSeries, h: int, level: float = 0.95) -> ForecastResult:
    """Forecast ``h`` periods past the end of ``s`` with fitted parameters ``f``.

    Point forecasts come from the state-space filter on the differenced scale
    and are integrated back; interval variances use psi-weights of the full
    integrated operator, treating the parameters as known.
    """
    if not isinstance(f, FitResult):
        raise ConfigError("forecast needs a FitResult")
    if h < 1:
        raise ConfigError(f"horizon must be >= 1, got {h}")
    if not 0 < level < 1:
        raise ConfigError(f"level must lie in (0, 1), got {level}")
    order = f.order
    y = np.asarray(s.values, dtype=float)
    w = difference(y, order.d, order.D, order.m)
    full_ar, full_ma = expand_polynomials(order, f.params)
    mean = process_mean(full_ar, f.params.constant)
    _, _, a, _, ok = _filter(w, full_ar, full_ma, mean)
    if not ok:
        raise LengthError("filter failed on the supplied history")

    phi = np.zeros(a.size)
    phi[: full_ar.size] = full_ar
    w_hat = np.empty(h)
    state = a.copy()
    for j in range(h):
        w_hat[j] = mean + state[0]
        state = phi * state[0] + np.r_[state[1:], 0.0]

    diff_poly = differencing_polynomial(order.d, order.D, order.m)
    lags = np.flatnonzero(diff_poly[1:]) + 1
    ext = np.r_[y, np.zeros(h)]
    n = y.size
    for j in range(h):
        t = n + j
        ext[t] = w_hat[j] - np.dot(diff_poly[lags], ext[t - lags])
    point = ext[n:]

    ar_poly, ma_poly = _integrated_operators(f)
    psi = psi_weights(ar_poly, ma_poly, h)
    sd = np.sqrt(f.params.sigma2 * np.cumsum(psi**2))
    z = stats.norm.ppf(0.5 + level / 2.0)
    return ForecastResult(
        origin=s.end,
        horizon=h,
        point=point,
        lo=point - z * sd,
        hi=point + z * sd,
        level=level,
        sd=sd,
        periods_per_year=s.periods_per_year,
    )


class OneStep(NamedTuple):
    period: Period
    actual: float
    predicted: float


def _min_train(order: ModelOrder) -> int:
    return order.n_diff + order.k + MIN_EXTRA_OBS


def rolling_one_step(
    s: TimeSeries,
    order: ModelOrder,
    window: tuple[Period, Period],
    refit: bool = False,
    fitted: FitResult | None = None,
    **fit_kwargs,
) -> list[OneStep]:
    """One-step-ahead predictions for every period in ``window`` (inclusive).

    Each prediction only sees data strictly before its period. With
    ``refit=False`` parameters are estimated once on the pre-window data (or
    taken from ``fitted``) and only the filter advances.
    """
    first, last = window
    i0, i1 = s.index_of(first), s.index_of(last)
    if i0 < 0 or i1 >= len(s) or i1 < i0:
        raise ConfigError(
            f"window {format_period(first)}..{format_period(last)} is outside "
            f"{format_period(s.start)}..{format_period(s.end)}"
        )
    if i0 < _min_train(order):
        raise LengthError(
            f"window starts after {i0} observations; {order} needs at least {_min_train(order)}"
        )
    y = np.asarray(s.values, dtype=float)

    if refit:
        rows = []
        for t in range(i0, i1 + 1):
            history = s.head(t)
            f_t = fit(history, order, **fit_kwargs)
            pred = forecast(f_t, history, 1).point[0]
            rows.append(OneStep(s.period_at(t), float(y[t]), float(pred)))
        return rows

    f = fitted if fitted is not None else fit(s.head(i0), order, **fit_kwargs)
    if f.order != order:
        raise ConfigError(f"fitted order {f.order} differs from {order}")
    w = difference(y[: i1 + 1], order.d, order.D, order.m)
    full_ar, full_ma = expand_polynomials(order, f.params)
    v, _, _, _, ok = _filter(w, full_ar, full_ma, process_mean(full_ar, f.params.constant))
    if not ok:
        raise LengthError("filter failed on the supplied history")
    # the differencing part of y_t is known at t-1, so the error in y equals the error in w
    return [
        OneStep(s.period_at(t), float(y[t]), float(y[t] - v[t - order.n_diff]))
        for t in range(i0, i1 + 1)
    ]
