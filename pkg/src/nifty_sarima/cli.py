"""Command-line front end.

Exit codes: 0 success, 1 usage/config error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import json
import logging
import re
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import plots
from .decompose import classical_decompose
from .errors import ConfigError, DataError, NumericalError
from .forecast import forecast, rolling_one_step
from .metrics import compute_metrics
from .sarima import ModelOrder, coefficient_table, fit
from .selection import GridSpec, default_jobs, grid_search
from .series import (
    Period,
    TimeSeries,
    format_period,
    load_series,
    parse_period,
    write_series_csv,
)

log = logging.getLogger("nifty_sarima")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


# ------------------------------------------------------------------ parsing


def parse_order(text: str, m: int = 12) -> ModelOrder:
    """Accept ``2,2,1,2,2,1,12``, ``2,2,1,2,2,1`` or ``(2,2,1)x(2,2,1,12)``."""
    nums = [int(v) for v in re.findall(r"\d+", text)]
    if len(nums) == 6:
        nums.append(m)
    if len(nums) == 3:
        nums += [0, 0, 0, 1]
    if len(nums) != 7:
        raise ConfigError(f"cannot parse order {text!r}")
    return ModelOrder(*nums)


def _parse_range(text: str) -> tuple[int, ...]:
    text = text.strip()
    try:
        if ".." in text:
            lo, hi = (int(v) for v in text.split(".."))
            if hi < lo:
                raise ValueError
            return tuple(range(lo, hi + 1))
        return tuple(int(v) for v in text.split("|"))
    except ValueError:
        raise ConfigError(f"bad grid range {text!r}, expected LO..HI") from None


def parse_grid(text: str | None, m: int = 12) -> GridSpec:
    """``0..2`` for all six orders, optionally followed by overrides like ``d=1,D=0..1``."""
    if not text:
        return GridSpec(m=m)
    ranges = {}
    default = None
    for item in text.split(","):
        if "=" in item:
            key, value = item.split("=", 1)
            key = key.strip()
            if key not in ("p", "d", "q", "P", "D", "Q"):
                raise ConfigError(f"unknown grid key {key!r}")
            ranges[key] = _parse_range(value)
        else:
            default = _parse_range(item)
    base = default if default is not None else (0, 1, 2)
    return GridSpec(**{k: ranges.get(k, base) for k in ("p", "d", "q", "P", "D", "Q")}, m=m)


def parse_window(text: str) -> tuple[Period, Period]:
    """``2018-01:2018-12`` (inclusive)."""
    try:
        first, last = text.split(":")
    except ValueError:
        raise ConfigError(f"bad window {text!r}, expected YYYY-MM:YYYY-MM") from None
    window = (parse_period(first), parse_period(last))
    if window[1] < window[0]:
        raise ConfigError(f"window {text!r} ends before it starts")
    return window


def _months_between(a: Period, b: Period) -> int:
    return (b[0] - a[0]) * 12 + (b[1] - a[1])


@dataclass(frozen=True)
class RunConfig:
    input: Path
    out: Path
    date_column: str = "Date"
    close_column: str = "Close"
    train_end: Period = (2017, 12)
    backtest: tuple[Period, Period] = ((2018, 1), (2018, 12))
    holdout: tuple[Period, Period] = ((2019, 1), (2019, 6))
    grid: GridSpec = field(default_factory=GridSpec)
    horizon: int = 12
    level: float = 0.95
    seed: int = 0
    refit: bool = False

    def validate(self, series: TimeSeries | None = None) -> None:
        if not self.train_end < self.backtest[0]:
            raise ConfigError("backtest window must start after the training span")
        if not self.backtest[1] < self.holdout[0]:
            raise ConfigError("holdout window must start after the backtest window")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1")
        if not 0 < self.level < 1:
            raise ConfigError("level must lie in (0, 1)")
        if series is not None:
            if not series.start <= self.train_end:
                raise ConfigError("training span ends before the data starts")
            if self.holdout[1] > series.end:
                raise ConfigError(
                    f"holdout ends {format_period(self.holdout[1])}, after the data ({format_period(series.end)})"
                )

    def to_dict(self) -> dict:
        return {
            "input": str(self.input),
            "date_column": self.date_column,
            "close_column": self.close_column,
            "train_end": format_period(self.train_end),
            "backtest": [format_period(p) for p in self.backtest],
            "holdout": [format_period(p) for p in self.holdout],
            "grid": self.grid.to_dict(),
            "horizon": self.horizon,
            "level": self.level,
            "seed": self.seed,
            "refit": self.refit,
        }


# ------------------------------------------------------------------ helpers


def _summary(s: TimeSeries) -> dict:
    return {
        "start": format_period(s.start),
        "end": format_period(s.end),
        "n": len(s),
        "min": float(np.min(s.values)),
        "max": float(np.max(s.values)),
    }


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=False) + "\n")


def _load(args) -> TimeSeries:
    if not args.input:
        raise ConfigError("--input is required")
    return load_series(args.input, args.date_column, args.close_column)


def _upto(s: TimeSeries, last: Period) -> TimeSeries:
    n = s.index_of(last) + 1
    if n < 1:
        raise ConfigError(f"{format_period(last)} is before the series start {format_period(s.start)}")
    return s.head(min(n, len(s)))


def _fit_summary(f) -> dict:
    return {
        "order": list(f.order.as_tuple()),
        "label": str(f.order),
        "k": f.k,
        "loglik": f.loglik,
        "aic": f.aic,
        "n_effective": f.n_effective,
        "converged": f.converged,
        "coefficients": coefficient_table(f).to_dict(),
    }


def _write_ranking(path: Path, result) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["p", "d", "q", "P", "D", "Q", "m", "k", "loglik", "aic", "converged"])
        for c in result.ranked:
            writer.writerow([*c.order.as_tuple(), c.k, repr(c.loglik), repr(c.aic), str(c.converged).lower()])


def _selection_summary(result) -> dict:
    w = result.winner
    return {
        "attempted": result.attempted,
        "fitted": len(result.ranked),
        "converged": sum(c.converged for c in result.ranked),
        "failures": [{"order": list(o), "reason": r} for o, r in result.failures],
        "winner": {"order": list(w.order.as_tuple()), "label": str(w.order), "aic": w.aic, "loglik": w.loglik, "k": w.k},
    }


def _rows_json(rows) -> list[dict]:
    return [{"period": format_period(r.period), "actual": r.actual, "predicted": r.predicted} for r in rows]


def _write_rows_csv(path: Path, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["period", "actual", "predicted"])
        for r in rows:
            writer.writerow([format_period(r.period), repr(r.actual), repr(r.predicted)])


def _write_forecast_csv(path: Path, fc) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["period", "point", "lo", "hi"])
        for row in fc.rows():
            writer.writerow([row["period"], repr(row["point"]), repr(row["lo"]), repr(row["hi"])])


# ------------------------------------------------------------------ commands


def cmd_ingest(args) -> int:
    s = _load(args)
    out = args.out
    write_series_csv(s, out / "series.csv")
    summary = _summary(s)
    _write_json(out / "summary.json", summary)
    if args.plots:
        plots.series_line(out / "fig1_series", s)
        plots.yearly_boxplot(out / "fig2_yearly_boxplot", s)
        plots.month_overlay(out / "fig3_month_overlay", s)
    print(f"{summary['n']} monthly values {summary['start']}..{summary['end']} "
          f"(min {summary['min']:.2f}, max {summary['max']:.2f})")
    return EXIT_OK


def cmd_decompose(args) -> int:
    s = _load(args)
    res = classical_decompose(s, args.period)
    if args.plots:
        plots.decomposition_panels(args.out / "fig4_decomposition", s, res)
    plots.decomposition_csv(args.out / "decomposition.csv", s, res)
    print(f"decomposed {len(s)} points with period {res.period}")
    return EXIT_OK


def cmd_fit(args) -> int:
    s = _load(args)
    if args.train_end:
        s = _upto(s, parse_period(args.train_end))
    f = fit(s, parse_order(args.order, args.m))
    table = coefficient_table(f)
    (args.out / "coefficients.txt").write_text(table.to_text() + "\n")
    _write_json(args.out / "fit.json", _fit_summary(f))
    print(f"{f.order}  loglik {f.loglik:.2f}  AIC {f.aic:.2f}  converged={f.converged}")
    print(table.to_text())
    return EXIT_OK if f.converged else EXIT_NUMERIC


def cmd_select(args) -> int:
    s = _load(args)
    if args.train_end:
        s = _upto(s, parse_period(args.train_end))
    result = grid_search(s, parse_grid(args.grid, args.m), jobs=args.jobs)
    _write_ranking(args.out / "ranking.csv", result)
    summary = _selection_summary(result)
    _write_json(args.out / "selection.json", summary)
    if args.plots:
        plots.aic_rank_plot(args.out / "fig8_aic_rank", result.ranked)
    w = summary["winner"]
    print(f"{summary['attempted']} orders attempted, {summary['converged']} converged; "
          f"best {w['label']} AIC {w['aic']:.2f}")
    return EXIT_OK


def cmd_backtest(args) -> int:
    s = _load(args)
    window = parse_window(args.window)
    rows = rolling_one_step(s, parse_order(args.order, args.m), window, refit=args.refit)
    _write_rows_csv(args.out / "backtest.csv", rows)
    if args.plots:
        plots.backtest_plot(args.out / "fig5_backtest", rows)
    report = compute_metrics([r.actual for r in rows], [r.predicted for r in rows])
    print(report.to_text())
    return EXIT_OK


def _holdout(s: TimeSeries, order: ModelOrder, window, level: float):
    first, last = window
    i = s.index_of(first)
    if i <= 0:
        raise ConfigError("holdout must start after the first observation")
    train = s.head(i)
    h = _months_between(first, last) + 1
    f = fit(train, order)
    fc = forecast(f, train, h, level)
    actual = s.window(first, last).values
    return f, train, fc, actual, compute_metrics(actual, fc.point)


def cmd_validate(args) -> int:
    s = _load(args)
    window = parse_window(args.holdout)
    _, train, fc, actual, report = _holdout(s, parse_order(args.order, args.m), window, args.level)
    with open(args.out / "validation.csv", "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["period", "actual", "point", "lo", "hi"])
        for row, a in zip(fc.rows(), actual):
            writer.writerow([row["period"], repr(float(a)), repr(row["point"]), repr(row["lo"]), repr(row["hi"])])
    (args.out / "metrics.txt").write_text(report.to_text() + "\n")
    _write_json(args.out / "metrics.json", report.to_dict())
    if args.plots:
        plots.forecast_plot(args.out / "fig6_validation", train, fc, actual, title="Holdout validation")
    print(report.to_text())
    return EXIT_OK


def cmd_forecast(args) -> int:
    s = _load(args)
    f = fit(s, parse_order(args.order, args.m))
    fc = forecast(f, s, args.horizon, args.level)
    _write_forecast_csv(args.out / "forecast.csv", fc)
    if args.plots:
        plots.forecast_plot(args.out / "fig7_forecast", s, fc)
    for row in fc.rows():
        print(f"{row['period']}  {row['point']:.2f}  [{row['lo']:.2f}, {row['hi']:.2f}]")
    return EXIT_OK


def config_from_args(args) -> RunConfig:
    return RunConfig(
        input=Path(args.input) if args.input else Path(),
        out=args.out,
        date_column=args.date_column,
        close_column=args.close_column,
        train_end=parse_period(args.train_end or "2017-12"),
        backtest=parse_window(args.backtest),
        holdout=parse_window(args.holdout),
        grid=parse_grid(args.grid, args.m),
        horizon=args.horizon,
        level=args.level,
        seed=args.seed,
        refit=args.refit,
    )


def run_pipeline(config: RunConfig, jobs: int | None = None, make_plots: bool = False) -> dict:
    """Select, backtest, validate and forecast; returns the report written to report.json.

    The report is flushed with ``status: "failed"`` and the sections finished
    so far if any stage raises.
    """
    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    report: dict = {"status": "running", "config": config.to_dict()}
    started = time.time()
    try:
        config.validate()
        s = load_series(config.input, config.date_column, config.close_column)
        config.validate(s)
        report["series"] = _summary(s)
        write_series_csv(s, out / "series.csv")

        train = _upto(s, config.train_end)
        result = grid_search(train, config.grid, jobs=jobs)
        _write_ranking(out / "ranking.csv", result)
        report["selection"] = _selection_summary(result)
        winner = result.winner.fit
        order = winner.order
        table = coefficient_table(winner)
        (out / "coefficients.txt").write_text(table.to_text() + "\n")
        report["train_fit"] = _fit_summary(winner)
        log.info("winner %s AIC %.2f", order, winner.aic)

        adjacent = s.index_of(config.backtest[0]) == len(train)
        rows = rolling_one_step(
            s, order, config.backtest, refit=config.refit,
            fitted=winner if adjacent and not config.refit else None,
        )
        _write_rows_csv(out / "backtest.csv", rows)
        bt_metrics = compute_metrics([r.actual for r in rows], [r.predicted for r in rows])
        report["backtest"] = {"rows": _rows_json(rows), "metrics": bt_metrics.to_dict()}

        _, ho_train, ho_fc, actual, ho_metrics = _holdout(s, order, config.holdout, config.level)
        (out / "metrics.txt").write_text(ho_metrics.to_text() + "\n")
        report["holdout"] = {
            "rows": [dict(r, actual=float(a)) for r, a in zip(ho_fc.rows(), actual)],
            "metrics": ho_metrics.to_dict(),
        }

        final = fit(s, order)
        fc = forecast(final, s, config.horizon, config.level)
        _write_forecast_csv(out / "forecast.csv", fc)
        report["final_fit"] = _fit_summary(final)
        report["forecast"] = {"origin": format_period(fc.origin), "level": fc.level, "rows": fc.rows()}

        if make_plots:
            plots.series_line(out / "fig1_series", s)
            plots.yearly_boxplot(out / "fig2_yearly_boxplot", s)
            plots.month_overlay(out / "fig3_month_overlay", s)
            plots.decomposition_panels(out / "fig4_decomposition", s, classical_decompose(s))
            plots.backtest_plot(out / "fig5_backtest", rows)
            plots.forecast_plot(out / "fig6_validation", ho_train, ho_fc, actual, title="Holdout validation")
            plots.forecast_plot(out / "fig7_forecast", s, fc)
            plots.aic_rank_plot(out / "fig8_aic_rank", result.ranked)
        report["status"] = "ok"
        return report
    except Exception as exc:
        report["status"] = "failed"
        report["error"] = f"{type(exc).__name__}: {exc}"
        raise
    finally:
        _write_json(out / "report.json", report)
        _write_json(out / "run_meta.json", {
            "finished_at": dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds"),
            "elapsed_seconds": round(time.time() - started, 3),
            "jobs": jobs,
        })


def cmd_pipeline(args) -> int:
    config = config_from_args(args)
    if not args.input:
        raise ConfigError("--input is required")
    report = run_pipeline(config, jobs=args.jobs, make_plots=args.plots)
    sel = report["selection"]["winner"]
    print(f"winner {sel['label']} AIC {sel['aic']:.2f}")
    print((args.out / "coefficients.txt").read_text().rstrip())
    print((args.out / "metrics.txt").read_text().rstrip())
    return EXIT_OK


# ------------------------------------------------------------------ parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", help="daily quotes CSV or normalized period,value CSV")
    common.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    common.add_argument("--jobs", type=int, default=None, help="worker processes for grid search")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--plots", action="store_true", help="emit SVG figures with CSV twins")
    common.add_argument("--date-column", default="Date")
    common.add_argument("--close-column", default="Close")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="nifty-sarima", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    def orders(p, need_order=True):
        if need_order:
            p.add_argument("--order", required=True, help="p,d,q,P,D,Q[,m], e.g. 2,2,1,2,2,1,12")
        p.add_argument("--m", type=int, default=12, help="season length")

    add("ingest", cmd_ingest, "resample daily quotes to a monthly series")
    p = add("decompose", cmd_decompose, "classical additive decomposition")
    p.add_argument("--period", type=int, default=12)
    p = add("fit", cmd_fit, "fit one order and print its coefficient table")
    orders(p)
    p.add_argument("--train-end", help="last period used for fitting (YYYY-MM)")
    p = add("select", cmd_select, "AIC grid search")
    orders(p, need_order=False)
    p.add_argument("--grid", help="ranges, e.g. 0..2 or 0..1,d=1,D=1 (default 0..2 for all six)")
    p.add_argument("--train-end", help="last period used for fitting (YYYY-MM)")
    p = add("backtest", cmd_backtest, "rolling one-step-ahead forecasts")
    orders(p)
    p.add_argument("--window", default="2018-01:2018-12")
    p.add_argument("--refit", action="store_true", help="re-estimate parameters at every step")
    p = add("validate", cmd_validate, "holdout forecast accuracy")
    orders(p)
    p.add_argument("--holdout", default="2019-01:2019-06")
    p.add_argument("--level", type=float, default=0.95)
    p = add("forecast", cmd_forecast, "forecast past the end of the series")
    orders(p)
    p.add_argument("--horizon", type=int, default=12)
    p.add_argument("--level", type=float, default=0.95)
    p = add("pipeline", cmd_pipeline, "select, backtest, validate and forecast end to end")
    orders(p, need_order=False)
    p.add_argument("--grid", help="ranges, e.g. 0..2 or 0..1,d=1,D=1 (default 0..2 for all six)")
    p.add_argument("--train-end", default="2017-12")
    p.add_argument("--backtest", default="2018-01:2018-12")
    p.add_argument("--holdout", default="2019-01:2019-06")
    p.add_argument("--horizon", type=int, default=12)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--refit", action="store_true")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.jobs is None:
        args.jobs = default_jobs()
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
