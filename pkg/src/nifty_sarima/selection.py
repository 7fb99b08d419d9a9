"""Exhaustive order search ranked by AIC."""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, NumericalError
from .sarima import FitResult, ModelOrder, aic, fit  # noqa: F401  (aic re-exported)
from .series import TimeSeries

DEFAULT_RANGE = (0, 1, 2)


def _as_range(values) -> tuple[int, ...]:
    out = tuple(sorted({int(v) for v in values}))
    if not out or out[0] < 0:
        raise ConfigError(f"grid range must be a non-empty set of non-negative ints, got {values!r}")
    return out


@dataclass(frozen=True)
class GridSpec:
    p: tuple[int, ...] = DEFAULT_RANGE
    d: tuple[int, ...] = DEFAULT_RANGE
    q: tuple[int, ...] = DEFAULT_RANGE
    P: tuple[int, ...] = DEFAULT_RANGE
    D: tuple[int, ...] = DEFAULT_RANGE
    Q: tuple[int, ...] = DEFAULT_RANGE
    m: int = 12

    def __post_init__(self):
        for name in ("p", "d", "q", "P", "D", "Q"):
            object.__setattr__(self, name, _as_range(getattr(self, name)))
        if self.m < 1:
            raise ConfigError("m must be positive")

    @classmethod
    def uniform(cls, values, m: int = 12) -> "GridSpec":
        return cls(*([tuple(values)] * 6), m=m)

    @property
    def size(self) -> int:
        return int(np.prod([len(r) for r in (self.p, self.d, self.q, self.P, self.D, self.Q)]))

    def raw_orders(self):
        return itertools.product(self.p, self.d, self.q, self.P, self.D, self.Q)

    def to_dict(self) -> dict:
        return {k: list(getattr(self, k)) for k in ("p", "d", "q", "P", "D", "Q")} | {"m": self.m}


@dataclass(frozen=True)
class Candidate:
    order: ModelOrder
    aic: float
    loglik: float
    converged: bool
    fit: FitResult = field(repr=False, compare=False)

    @property
    def k(self) -> int:
        return self.order.k

    def sort_key(self):
        return (self.aic, self.order.as_tuple())


@dataclass(frozen=True)
class GridResult:
    ranked: tuple[Candidate, ...]
    failures: tuple[tuple[tuple[int, ...], str], ...]

    @property
    def attempted(self) -> int:
        return len(self.ranked) + len(self.failures)

    @property
    def winner(self) -> Candidate:
        for c in self.ranked:
            if c.converged:
                return c
        raise NumericalError("no candidate converged")


def _fit_one(args):
    raw, m, y, fit_kwargs = args
    try:
        order = ModelOrder(*raw, m=m)
        return raw, fit(y, order, **fit_kwargs), None
    except (ValueError, ArithmeticError, NumericalError, np.linalg.LinAlgError) as exc:
        return raw, None, f"{type(exc).__name__}: {exc}"


def default_jobs() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover
        return os.cpu_count() or 1


def grid_search(s, g: GridSpec | None = None, jobs: int | None = None, **fit_kwargs) -> GridResult:
    """Fit every order in the grid once and rank by AIC.

    Ties in AIC go to the lexicographically smaller (p, d, q, P, D, Q).
    Orders that cannot be fitted (too little data after differencing,
    numerical failure) land in ``failures``; the sweep keeps going.
    The ranking does not depend on ``jobs``.
    """
    g = g or GridSpec()
    y = np.asarray(s.values if isinstance(s, TimeSeries) else s, dtype=float)
    tasks = [(raw, g.m, y, fit_kwargs) for raw in g.raw_orders()]
    jobs = default_jobs() if jobs is None else max(1, int(jobs))
    if jobs == 1 or len(tasks) == 1:
        outcomes = [_fit_one(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_fit_one, tasks, chunksize=max(1, len(tasks) // (8 * jobs))))

    ranked, failures = [], []
    for raw, f, reason in outcomes:
        if f is None:
            failures.append((tuple(raw), reason))
        else:
            ranked.append(Candidate(f.order, f.aic, f.loglik, f.converged, f))
    if not ranked:
        raise NumericalError("every order in the grid failed to fit")
    ranked.sort(key=Candidate.sort_key)
    failures.sort()
    return GridResult(tuple(ranked), tuple(failures))
