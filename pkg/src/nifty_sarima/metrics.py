"""Holdout accuracy metrics (ME, MAE, RMSE, MPE, MAPE)."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DataError

_LABELS = (
    ("Mean Absolute Percentage Error", "MAPE", "mape"),
    ("Mean Error", "ME", "me"),
    ("Mean Absolute Error", "MAE", "mae"),
    ("Mean Percentage Error", "MPE", "mpe"),
    ("Root Mean Square Error", "RMSE", "rmse"),
)


@dataclass(frozen=True)
class MetricsReport:
    """Errors are ``actual - predicted``; percentages are on a 0-100 scale."""

    mape: float
    me: float
    mae: float
    mpe: float
    rmse: float
    n: int

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_text(self) -> str:
        width = max(len(long) for long, _, _ in _LABELS)
        return "\n".join(f"{long:<{width}}  {abbr:<5} {getattr(self, key):.2f}" for long, abbr, key in _LABELS)


def compute_metrics(actual, predicted) -> MetricsReport:
    actual = np.asarray(actual, dtype=float)
    predicted = np.asarray(predicted, dtype=float)
    if actual.shape != predicted.shape or actual.ndim != 1:
        raise DataError(f"length mismatch: {actual.shape} vs {predicted.shape}")
    if actual.size == 0:
        raise DataError("need at least one point")
    if np.any(actual == 0):
        raise DataError("percentage metrics undefined for zero actual values")
    e = actual - predicted
    pct = 100.0 * e / actual
    return MetricsReport(
        mape=float(np.mean(np.abs(pct))),
        me=float(np.mean(e)),
        mae=float(np.mean(np.abs(e))),
        mpe=float(np.mean(pct)),
        rmse=float(np.sqrt(np.mean(e * e))),
        n=int(actual.size),
    )
