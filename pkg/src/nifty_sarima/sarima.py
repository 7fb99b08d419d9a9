"""Multiplicative seasonal ARIMA: likelihood, estimation, inference, simulation.

Sign conventions follow the usual regression form::

    w_t = c + sum_i ar_i w_{t-i} + e_t + sum_j ma_j e_{t-j}

with seasonal factors multiplying the non-seasonal ones, i.e. the full AR
operator is (1 - sum ar_i B^i)(1 - sum sar_k B^{km}) and the full MA operator
is (1 + sum ma_j B^j)(1 + sum sma_k B^{km}).  ``w`` is the series after
(1 - B)^d (1 - B^m)^D differencing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, signal, stats

from . import _kalman
from .errors import ConfigError, LengthError, NumericalError
from .series import TimeSeries, difference, integrate

MAX_ARMA_TERMS = 12
LOGLIK_PENALTY = -1.0e10
MIN_EXTRA_OBS = 10

LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True, order=True)
class ModelOrder:
    p: int = 0
    d: int = 0
    q: int = 0
    P: int = 0
    D: int = 0
    Q: int = 0
    m: int = 1

    def __post_init__(self):
        for name in ("p", "d", "q", "P", "D", "Q"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ConfigError(f"order {name} must be a non-negative integer, got {value!r}")
        if self.m < 1:
            raise ConfigError(f"season length m must be >= 1, got {self.m}")
        if self.m == 1 and (self.P or self.D or self.Q):
            raise ConfigError("seasonal orders require m > 1")
        if self.p + self.q + self.P + self.Q > MAX_ARMA_TERMS:
            raise ConfigError(f"p+q+P+Q exceeds the cap of {MAX_ARMA_TERMS}")

    @classmethod
    def from_tuple(cls, t) -> "ModelOrder":
        return cls(*(int(v) for v in t))

    def as_tuple(self) -> tuple[int, ...]:
        return (self.p, self.d, self.q, self.P, self.D, self.Q, self.m)

    @property
    def ar_degree(self) -> int:
        return self.p + self.m * self.P

    @property
    def ma_degree(self) -> int:
        return self.q + self.m * self.Q

    @property
    def n_diff(self) -> int:
        """Observations consumed by differencing."""
        return self.d + self.D * self.m

    @property
    def has_constant(self) -> bool:
        # differencing removes the level, so the intercept is pinned to zero
        return self.d + self.D == 0

    @property
    def k(self) -> int:
        """Estimated parameters, sigma2 included."""
        return self.p + self.q + self.P + self.Q + 1 + int(self.has_constant)

    def param_names(self) -> list[str]:
        names = ["intercept"] if self.has_constant else []
        names += [f"ar.L{i}" for i in range(1, self.p + 1)]
        names += [f"ma.L{i}" for i in range(1, self.q + 1)]
        names += [f"ar.S.L{self.m * i}" for i in range(1, self.P + 1)]
        names += [f"ma.S.L{self.m * i}" for i in range(1, self.Q + 1)]
        return names + ["sigma2"]

    def __str__(self) -> str:
        return f"SARIMA({self.p},{self.d},{self.q})x({self.P},{self.D},{self.Q},{self.m})"


def _floats(values) -> tuple[float, ...]:
    return tuple(float(v) for v in np.atleast_1d(np.asarray(values, dtype=float)))


@dataclass(frozen=True)
class SarimaParams:
    ar: tuple[float, ...] = ()
    ma: tuple[float, ...] = ()
    sar: tuple[float, ...] = ()
    sma: tuple[float, ...] = ()
    constant: float = 0.0
    sigma2: float = 1.0

    def __post_init__(self):
        for name in ("ar", "ma", "sar", "sma"):
            object.__setattr__(self, name, _floats(getattr(self, name)))
        object.__setattr__(self, "constant", float(self.constant))
        object.__setattr__(self, "sigma2", float(self.sigma2))
        if not self.sigma2 > 0:
            raise ConfigError(f"sigma2 must be positive, got {self.sigma2}")

    def check(self, order: ModelOrder) -> None:
        dims = (len(self.ar), len(self.ma), len(self.sar), len(self.sma))
        if dims != (order.p, order.q, order.P, order.Q):
            raise ConfigError(f"parameter dimensions {dims} do not match {order}")

    def is_stationary(self) -> bool:
        return bool(_stable(self.ar) and _stable(self.sar))

    def is_invertible(self) -> bool:
        return bool(_stable(-np.asarray(self.ma)) and _stable(-np.asarray(self.sma)))

    def coef_vector(self) -> np.ndarray:
        """Coefficients in the order of :meth:`ModelOrder.param_names`, minus sigma2."""
        return np.array(self.ar + self.ma + self.sar + self.sma, dtype=float)

    @classmethod
    def from_vector(cls, order: ModelOrder, x, sigma2: float, constant: float = 0.0) -> "SarimaParams":
        x = np.asarray(x, dtype=float)
        cuts = np.cumsum([order.p, order.q, order.P])
        ar, ma, sar, sma = np.split(x, cuts)
        return cls(ar, ma, sar, sma, constant=constant, sigma2=sigma2)


def _stable(coefs) -> bool:
    return _kalman.is_stable(np.asarray(coefs, dtype=float))


def _seasonal_poly(coefs, m: int, sign: float) -> np.ndarray:
    poly = np.zeros(m * len(coefs) + 1)
    poly[0] = 1.0
    for i, c in enumerate(coefs, start=1):
        poly[i * m] = sign * c
    return poly


def expand_polynomials(order: ModelOrder, params: SarimaParams) -> tuple[np.ndarray, np.ndarray]:
    """Multiply out the seasonal and non-seasonal factors.

    Returns ``(full_ar, full_ma)`` of lengths ``p + m*P`` and ``q + m*Q`` in
    regression form: ``w_t = sum full_ar[k-1] w_{t-k} + e_t + sum full_ma[k-1] e_{t-k}``.
    """
    params.check(order)
    ar_poly = np.convolve(np.r_[1.0, -np.asarray(params.ar)], _seasonal_poly(params.sar, order.m, -1.0))
    ma_poly = np.convolve(np.r_[1.0, np.asarray(params.ma)], _seasonal_poly(params.sma, order.m, 1.0))
    return -ar_poly[1:], ma_poly[1:]


def process_mean(full_ar: np.ndarray, constant: float) -> float:
    return constant / (1.0 - float(np.sum(full_ar))) if constant else 0.0


def _state_vectors(full_ar: np.ndarray, full_ma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = max(full_ar.size, full_ma.size + 1, 1)
    phi = np.zeros(r)
    phi[: full_ar.size] = full_ar
    rvec = np.zeros(r)
    rvec[0] = 1.0
    rvec[1 : full_ma.size + 1] = full_ma
    return phi, rvec


def _filter(w: np.ndarray, full_ar: np.ndarray, full_ma: np.ndarray, mean: float):
    phi, rvec = _state_vectors(full_ar, full_ma)
    return _kalman.kalman_filter(np.ascontiguousarray(w - mean, dtype=float), phi, rvec)


def log_likelihood(data, order: ModelOrder, params: SarimaParams, enforce_invertibility: bool = True) -> float:
    """Exact Gaussian log-likelihood of already-differenced data.

    Non-stationary or non-invertible parameters return ``LOGLIK_PENALTY``
    rather than raising, so optimizers can back away from them. The density
    itself only needs stationarity; ``enforce_invertibility=False`` lets
    callers probe across the MA unit circle.
    """
    if not params.is_stationary():
        return LOGLIK_PENALTY
    if enforce_invertibility and not params.is_invertible():
        return LOGLIK_PENALTY
    w = np.asarray(data, dtype=float)
    full_ar, full_ma = expand_polynomials(order, params)
    v, F, _, _, ok = _filter(w, full_ar, full_ma, process_mean(full_ar, params.constant))
    if not ok:
        return LOGLIK_PENALTY
    s2F = params.sigma2 * F
    return float(-0.5 * (w.size * LOG_2PI + np.sum(np.log(s2F)) + np.sum(v * v / s2F)))


@dataclass(frozen=True)
class FitResult:
    order: ModelOrder
    params: SarimaParams
    loglik: float
    aic: float
    n_effective: int
    residuals: np.ndarray = field(repr=False)
    covariance: np.ndarray = field(repr=False)
    converged: bool = True
    iterations: int = 0

    @property
    def k(self) -> int:
        return self.order.k

    @property
    def param_names(self) -> list[str]:
        return self.order.param_names()

    def param_vector(self) -> np.ndarray:
        """Estimates aligned with :attr:`param_names`."""
        head = [self.params.constant] if self.order.has_constant else []
        return np.r_[head, self.params.coef_vector(), self.params.sigma2]


def aic(loglik: float, k: int) -> float:
    """Akaike information criterion, 2k - 2 log L."""
    return 2.0 * k - 2.0 * loglik


class _Objective:
    """Negative profile log-likelihood over a scaled coefficient vector.

    sigma2 is concentrated out. When the model carries a level, the first
    coordinate is the process mean, standardized by the data's spread.
    """

    def __init__(self, w: np.ndarray, order: ModelOrder):
        self.w = w
        self.order = order
        self.with_mean = order.has_constant
        self.center = float(np.mean(w)) if self.with_mean else 0.0
        self.scale = float(np.std(w)) or 1.0

    def unpack(self, x):
        x = np.asarray(x, dtype=float)
        if self.with_mean:
            return self.center + self.scale * x[0], x[1:]
        return 0.0, x

    def terms(self, x):
        mean, coefs = self.unpack(x)
        params = SarimaParams.from_vector(self.order, coefs, sigma2=1.0)
        if not (params.is_stationary() and params.is_invertible()):
            return None
        full_ar, full_ma = expand_polynomials(self.order, params)
        v, F, _, _, ok = _filter(self.w, full_ar, full_ma, mean)
        if not ok:
            return None
        return v, F

    def profile_loglik(self, x) -> float:
        out = self.terms(x)
        if out is None:
            return LOGLIK_PENALTY
        v, F = out
        n = self.w.size
        s2 = float(np.sum(v * v / F)) / n
        if not s2 > 0:
            return LOGLIK_PENALTY
        return -0.5 * n * (LOG_2PI + 1.0 + math.log(s2)) - 0.5 * float(np.sum(np.log(F)))

    def __call__(self, x) -> float:
        return -self.profile_loglik(x)


def _full_loglik_fn(w: np.ndarray, order: ModelOrder):
    """log L as a function of the reported parameter vector (param_names order).

    Estimates often sit on the MA unit circle, so Hessian probes are allowed
    to cross it.
    """

    def fn(theta):
        theta = np.asarray(theta, dtype=float)
        constant = theta[0] if order.has_constant else 0.0
        coefs = theta[int(order.has_constant) : -1]
        if not theta[-1] > 0:
            return LOGLIK_PENALTY
        params = SarimaParams.from_vector(order, coefs, sigma2=theta[-1], constant=constant)
        return log_likelihood(w, order, params, enforce_invertibility=False)

    return fn


def numerical_hessian(fn, x, rel_step: float = 1e-4) -> np.ndarray:
    """Central-difference Hessian; NaN-filled if any probe hits the penalty."""
    x = np.asarray(x, dtype=float)
    k = x.size
    h = rel_step * np.maximum(np.abs(x), 1.0)
    f0 = fn(x)
    H = np.empty((k, k))
    probes = [f0]

    def at(i, si, j=None, sj=0.0):
        y = x.copy()
        y[i] += si * h[i]
        if j is not None:
            y[j] += sj * h[j]
        value = fn(y)
        probes.append(value)
        return value

    for i in range(k):
        H[i, i] = (at(i, 1.0) - 2.0 * f0 + at(i, -1.0)) / h[i] ** 2
        for j in range(i):
            H[i, j] = H[j, i] = (
                at(i, 1.0, j, 1.0) - at(i, 1.0, j, -1.0) - at(i, -1.0, j, 1.0) + at(i, -1.0, j, -1.0)
            ) / (4.0 * h[i] * h[j])
    if min(probes) <= LOGLIK_PENALTY:
        return np.full((k, k), np.nan)
    return H


def _covariance_from_hessian(H: np.ndarray) -> np.ndarray:
    k = H.shape[0]
    undefined = np.full((k, k), np.nan)
    if not np.all(np.isfinite(H)):
        return undefined
    info = -0.5 * (H + H.T)
    try:
        np.linalg.cholesky(info)
    except np.linalg.LinAlgError:
        return undefined
    cov = np.linalg.inv(info)
    return 0.5 * (cov + cov.T)


def _initial_simplex(x0: np.ndarray, step: float) -> np.ndarray:
    sim = np.tile(x0, (x0.size + 1, 1))
    for i in range(x0.size):
        sim[i + 1, i] += step
    return sim


def fit(
    s,
    order: ModelOrder,
    maxiter: int = 2000,
    fatol: float = 1e-8,
    simplex_step: float = 0.1,
) -> FitResult:
    """Maximum-likelihood fit by Nelder-Mead on the differenced series.

    Parameters
    ----------
    s : TimeSeries or array-like
        Undifferenced observations.
    order : ModelOrder
    maxiter : int
        Simplex iteration cap. Hitting it yields ``converged=False`` with the
        best point found, not an exception.
    fatol : float
        Convergence threshold on the spread of objective values across the simplex.

    Raises
    ------
    LengthError
        Fewer than ``k + 10`` observations remain after differencing.
    NumericalError
        No finite likelihood was found anywhere (e.g. degenerate data).
    """
    y = np.asarray(s.values if isinstance(s, TimeSeries) else s, dtype=float)
    if y.size <= order.n_diff:
        raise LengthError(f"{order} needs more than {order.n_diff} observations, got {y.size}")
    w = difference(y, order.d, order.D, order.m)
    if w.size < order.k + MIN_EXTRA_OBS:
        raise LengthError(
            f"{order} leaves {w.size} differenced observations, need at least {order.k + MIN_EXTRA_OBS}"
        )

    obj = _Objective(w, order)
    n_coef = order.p + order.q + order.P + order.Q
    x0 = np.zeros(n_coef + int(obj.with_mean))
    converged, iterations = True, 0
    if x0.size:
        res = optimize.minimize(
            obj,
            x0,
            method="Nelder-Mead",
            options={
                "maxiter": maxiter,
                "maxfev": 50 * maxiter,
                "xatol": np.inf,
                "fatol": fatol,
                "initial_simplex": _initial_simplex(x0, simplex_step),
            },
        )
        x_hat, converged, iterations = res.x, bool(res.success), int(res.nit)
    else:
        x_hat = x0

    out = obj.terms(x_hat)
    if out is None:
        raise NumericalError(f"{order}: no admissible parameters found")
    v, F = out
    sigma2 = float(np.sum(v * v / F)) / w.size
    if not sigma2 > 0:
        raise NumericalError(f"{order}: degenerate innovation variance")
    mean, coefs = obj.unpack(x_hat)
    probe = SarimaParams.from_vector(order, coefs, sigma2=sigma2)
    full_ar, _ = expand_polynomials(order, probe)
    constant = mean * (1.0 - float(np.sum(full_ar))) if order.has_constant else 0.0
    params = SarimaParams.from_vector(order, coefs, sigma2=sigma2, constant=constant)

    loglik = log_likelihood(w, order, params)
    if loglik <= LOGLIK_PENALTY:
        raise NumericalError(f"{order}: likelihood evaluation failed at the optimum")

    theta = np.r_[[constant] if order.has_constant else [], coefs, sigma2]
    H = numerical_hessian(_full_loglik_fn(w, order), theta)
    covariance = _covariance_from_hessian(H)

    return FitResult(
        order=order,
        params=params,
        loglik=loglik,
        aic=aic(loglik, order.k),
        n_effective=int(w.size),
        residuals=v / np.sqrt(sigma2 * F),
        covariance=covariance,
        converged=converged and bool(np.isfinite(loglik)),
        iterations=iterations,
    )


def from_params(s, order: ModelOrder, params: SarimaParams) -> FitResult:
    """Wrap known parameters as a FitResult (no estimation) for filtering/forecasting."""
    y = np.asarray(s.values if isinstance(s, TimeSeries) else s, dtype=float)
    w = difference(y, order.d, order.D, order.m)
    params.check(order)
    loglik = log_likelihood(w, order, params)
    full_ar, full_ma = expand_polynomials(order, params)
    v, F, _, _, ok = _filter(w, full_ar, full_ma, process_mean(full_ar, params.constant))
    k = order.k
    return FitResult(
        order=order,
        params=params,
        loglik=loglik,
        aic=aic(loglik, k),
        n_effective=int(w.size),
        residuals=v / np.sqrt(params.sigma2 * F) if ok else np.full(w.size, np.nan),
        covariance=np.full((k, k), np.nan),
        converged=True,
    )


# ---------------------------------------------------------------- inference


@dataclass(frozen=True)
class CoefficientRow:
    name: str
    coef: float
    std_err: float
    z: float
    p_value: float
    ci_low: float
    ci_high: float


Z_95 = 1.96


def coefficient_row(name: str, coef: float, std_err: float) -> CoefficientRow:
    """z statistic, two-sided normal p-value and coef +/- 1.96 se interval.

    An undefined (NaN) standard error propagates to z, p and the interval.
    """
    if np.isfinite(std_err) and std_err > 0:
        z = coef / std_err
        p = float(2.0 * stats.norm.sf(abs(z)))
    else:
        z = p = math.nan
    half = Z_95 * std_err
    return CoefficientRow(name, float(coef), float(std_err), float(z), p, coef - half, coef + half)


@dataclass(frozen=True)
class CoefficientTable:
    rows: tuple[CoefficientRow, ...]

    @property
    def names(self) -> list[str]:
        return [r.name for r in self.rows]

    def to_text(self) -> str:
        header = f"{'':>12}{'coef':>12}{'std err':>12}{'z':>12}{'P>|z|':>10}{'[0.025':>12}{'0.975]':>12}"
        lines = [header, "-" * len(header)]
        for r in self.rows:
            lines.append(
                f"{r.name:>12}{_g(r.coef):>12}{_g(r.std_err):>12}{_g(r.z):>12}"
                f"{_pval(r.p_value):>10}{_g(r.ci_low):>12}{_g(r.ci_high):>12}"
            )
        return "\n".join(lines)

    def to_dict(self) -> list[dict]:
        return [
            {
                "name": r.name,
                "coef": _json_num(r.coef),
                "std_err": _json_num(r.std_err),
                "z": _json_num(r.z),
                "p_value": _json_num(r.p_value),
                "ci_low": _json_num(r.ci_low),
                "ci_high": _json_num(r.ci_high),
            }
            for r in self.rows
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _json_num(x: float):
    return float(x) if np.isfinite(x) else None


def _g(x: float) -> str:
    if not np.isfinite(x):
        return "nan"
    if x != 0 and (abs(x) >= 1e4 or abs(x) < 1e-3):
        return f"{x:.3e}"
    return f"{x:.4f}"


def _pval(p: float) -> str:
    if not np.isfinite(p):
        return "nan"
    return f"{p:.3f}"


def coefficient_table(f: FitResult) -> CoefficientTable:
    values = f.param_vector()
    cov = np.asarray(f.covariance, dtype=float)
    diag = np.diag(cov) if cov.shape == (values.size, values.size) else np.full(values.size, np.nan)
    se = np.where(diag >= 0, np.sqrt(np.abs(diag)), np.nan)
    return CoefficientTable(tuple(coefficient_row(n, v, s) for n, v, s in zip(f.param_names, values, se)))


# ---------------------------------------------------------------- simulation


def default_burn_in(order: ModelOrder) -> int:
    return 10 * (order.ar_degree + order.ma_degree) + 100


def simulate(
    order: ModelOrder,
    params: SarimaParams,
    n: int,
    seed=None,
    burn_in: int | None = None,
    start=(2000, 1),
) -> TimeSeries:
    """Draw a Gaussian SARIMA path of length ``n``.

    The stationary ARMA part is run for ``burn_in`` extra steps that are
    discarded; integration then starts from zeros.
    """
    if n < 1:
        raise ConfigError("n must be positive")
    if not (params.is_stationary() and params.is_invertible()):
        raise ConfigError("simulation needs stationary, invertible parameters")
    burn = default_burn_in(order) if burn_in is None else burn_in
    full_ar, full_ma = expand_polynomials(order, params)
    rng = np.random.default_rng(seed)
    n_w = max(n - order.n_diff, 0)
    e = rng.normal(0.0, math.sqrt(params.sigma2), size=n_w + burn)
    w = signal.lfilter(np.r_[1.0, full_ma], np.r_[1.0, -full_ar], e)[burn:]
    w = w + process_mean(full_ar, params.constant)
    if order.n_diff:
        y = integrate(w, order.d, order.D, order.m, np.zeros(order.n_diff))[:n]
    else:
        y = w
    return TimeSeries(y, start, order.m if order.m > 1 else 12)
