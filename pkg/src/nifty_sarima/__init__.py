"""Seasonal ARIMA forecasting for monthly index series."""

from .decompose import DecompositionResult, classical_decompose
from .errors import ConfigError, DataError, GapError, LengthError, NumericalError, ParseError
from .forecast import ForecastResult, forecast, rolling_one_step
from .metrics import MetricsReport, compute_metrics
from .sarima import (
    CoefficientTable,
    FitResult,
    ModelOrder,
    SarimaParams,
    aic,
    coefficient_table,
    expand_polynomials,
    fit,
    log_likelihood,
    simulate,
)
from .selection import GridResult, GridSpec, grid_search
from .series import (
    DailyQuotes,
    TimeSeries,
    difference,
    integrate,
    load_series,
    read_quotes_csv,
    resample_monthly_mean,
    split,
)

__version__ = "0.1.0"
