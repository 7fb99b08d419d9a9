"""Static SVG figures, each written next to a CSV holding exactly the plotted numbers."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .decompose import DecompositionResult  # noqa: E402
from .series import TimeSeries, format_period  # noqa: E402

plt.rcParams["svg.hashsalt"] = "nifty-sarima"
_SVG_META = {"Date": None}


def _num(x) -> str:
    return "" if x is None or not np.isfinite(x) else repr(float(x))


def _write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _save(fig, stem: Path) -> None:
    fig.tight_layout()
    fig.savefig(stem.with_suffix(".svg"), format="svg", metadata=_SVG_META)
    plt.close(fig)


def _x(series_or_periods) -> np.ndarray:
    periods = series_or_periods.periods() if isinstance(series_or_periods, TimeSeries) else series_or_periods
    return np.array([y + (m - 1) / 12.0 for y, m in periods])


def series_line(stem: Path, s: TimeSeries, title: str = "Monthly average close") -> None:
    _write_csv(stem.with_suffix(".csv"), ["period", "value"],
               [[format_period(p), _num(v)] for p, v in zip(s.periods(), s.values)])
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.plot(_x(s), s.values, color="tab:blue")
    ax.set_title(title)
    ax.set_xlabel("year")
    _save(fig, stem)


def yearly_box_stats(s: TimeSeries) -> list[tuple[int, float, float, float, float, float]]:
    """(year, min, q1, median, q3, max) per calendar year."""
    by_year: dict[int, list[float]] = {}
    for (year, _), v in zip(s.periods(), s.values):
        by_year.setdefault(year, []).append(float(v))
    out = []
    for year in sorted(by_year):
        vals = np.asarray(by_year[year])
        q1, med, q3 = np.percentile(vals, [25, 50, 75])
        out.append((year, float(vals.min()), float(q1), float(med), float(q3), float(vals.max())))
    return out


def yearly_boxplot(stem: Path, s: TimeSeries) -> None:
    stats = yearly_box_stats(s)
    _write_csv(stem.with_suffix(".csv"), ["year", "min", "q1", "median", "q3", "max"],
               [[y] + [_num(v) for v in rest] for y, *rest in stats])
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.bxp(
        [{"label": str(y), "whislo": lo, "q1": q1, "med": med, "q3": q3, "whishi": hi, "fliers": []}
         for y, lo, q1, med, q3, hi in stats],
        showfliers=False,
    )
    ax.set_title("Closing price by year")
    _save(fig, stem)


def month_overlay(stem: Path, s: TimeSeries) -> None:
    rows = [[y, m, _num(v)] for (y, m), v in zip(s.periods(), s.values)]
    _write_csv(stem.with_suffix(".csv"), ["year", "month", "value"], rows)
    fig, ax = plt.subplots(figsize=(9, 4))
    years = sorted({y for y, _ in s.periods()})
    for year in years:
        pts = [(m, v) for (y, m), v in zip(s.periods(), s.values) if y == year]
        ax.plot([m for m, _ in pts], [v for _, v in pts], marker="o", ms=3, label=str(year))
    ax.set_xticks(range(1, 13))
    ax.set_xlabel("month")
    ax.legend(fontsize=7, ncol=2)
    ax.set_title("Seasonal plot")
    _save(fig, stem)


def decomposition_csv(path: Path, s: TimeSeries, res: DecompositionResult) -> None:
    _write_csv(path, ["period", "observed", "trend", "seasonal", "residual"], [
        [format_period(p), _num(o), _num(t), _num(se), _num(r)]
        for p, o, t, se, r in zip(s.periods(), res.observed, res.trend, res.seasonal, res.residual)
    ])


def decomposition_panels(stem: Path, s: TimeSeries, res: DecompositionResult) -> None:
    decomposition_csv(stem.with_suffix(".csv"), s, res)
    x = _x(s)
    fig, axes = plt.subplots(4, 1, figsize=(9, 8), sharex=True)
    for ax, name, values in zip(axes, ("observed", "trend", "seasonal", "residual"),
                                (res.observed, res.trend, res.seasonal, res.residual)):
        ax.plot(x, values, marker="." if name == "residual" else None, lw=1)
        ax.set_ylabel(name)
    _save(fig, stem)


def backtest_plot(stem: Path, rows, title: str = "One-step-ahead forecasts") -> None:
    _write_csv(stem.with_suffix(".csv"), ["period", "actual", "predicted"],
               [[format_period(r.period), _num(r.actual), _num(r.predicted)] for r in rows])
    x = _x([r.period for r in rows])
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.plot(x, [r.actual for r in rows], marker="o", label="actual")
    ax.plot(x, [r.predicted for r in rows], marker="x", label="predicted")
    ax.legend()
    ax.set_title(title)
    _save(fig, stem)


def forecast_plot(stem: Path, history: TimeSeries, fc, actual=None, title: str = "Forecast") -> None:
    """History, point path and shaded band; ``actual`` overlays holdout observations."""
    periods = fc.periods()
    header = ["period", "history", "point", "lo", "hi"] + (["actual"] if actual is not None else [])
    rows = [[format_period(p), _num(v), "", "", ""] + ([""] if actual is not None else [])
            for p, v in zip(history.periods(), history.values)]
    for j, p in enumerate(periods):
        row = [format_period(p), "", _num(fc.point[j]), _num(fc.lo[j]), _num(fc.hi[j])]
        if actual is not None:
            row.append(_num(actual[j]))
        rows.append(row)
    _write_csv(stem.with_suffix(".csv"), header, rows)

    fig, ax = plt.subplots(figsize=(9, 4))
    ax.plot(_x(history), history.values, color="tab:blue", label="observed")
    xf = _x(periods)
    ax.plot(xf, fc.point, color="tab:red", label="forecast")
    ax.fill_between(xf, fc.lo, fc.hi, color="tab:red", alpha=0.2, label=f"{fc.level:.0%} interval")
    if actual is not None:
        ax.plot(xf, actual, color="black", marker="o", ms=3, ls="none", label="actual")
    ax.legend()
    ax.set_title(title)
    _save(fig, stem)


def aic_rank_plot(stem: Path, ranked) -> None:
    rows = [[i + 1, *c.order.as_tuple()[:6], _num(c.aic)] for i, c in enumerate(ranked) if c.converged]
    _write_csv(stem.with_suffix(".csv"), ["rank", "p", "d", "q", "P", "D", "Q", "aic"], rows)
    fig, ax = plt.subplots(figsize=(9, 4))
    ax.plot([r[0] for r in rows], [float(r[-1]) for r in rows], marker=".", ls="none")
    if rows:
        ax.annotate(f"min AIC {float(rows[0][-1]):.2f}", (rows[0][0], float(rows[0][-1])))
    ax.set_xlabel("rank")
    ax.set_ylabel("AIC")
    ax.set_title("AIC by rank (converged fits)")
    _save(fig, stem)
