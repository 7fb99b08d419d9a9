"""Acceptance gate: one test per criterion, each reporting a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v``; the summary section
"acceptance criteria" lists every outcome with the measured value.
"""

import json
import os
import time

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE_LINES
from nifty_sarima.cli import main
from nifty_sarima.decompose import classical_decompose
from nifty_sarima.forecast import forecast
from nifty_sarima.metrics import compute_metrics
from nifty_sarima.sarima import (
    ModelOrder,
    SarimaParams,
    aic,
    coefficient_row,
    fit,
    from_params,
    log_likelihood,
    simulate,
)
from nifty_sarima.selection import GridSpec, grid_search
from nifty_sarima.series import TimeSeries, difference, integrate


def report(name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    assert ok, f"{name}: {detail}"


@pytest.mark.slow
def test_grid_cardinality(monthly):
    assert len(monthly) == 132
    t0 = time.perf_counter()
    result = grid_search(monthly, GridSpec())
    elapsed = time.perf_counter() - t0
    total = len(result.ranked) + len(result.failures)
    report(
        "grid cardinality",
        total == 729 and elapsed < 600,
        f"{total} orders attempted ({len(result.failures)} failed) in {elapsed:.0f} s (limit 600 s)",
    )


def _random_instance(rng):
    m = int(rng.integers(1, 5))
    while True:
        p, q = (int(v) for v in rng.integers(0, 3, size=2))
        P, Q = (0, 0) if m == 1 else (int(v) for v in rng.integers(0, 2, size=2))
        if p + q + m * (P + Q) <= 4:
            break
    while True:
        ar, ma, sar, sma = (rng.uniform(-0.9, 0.9, size=k) for k in (p, q, P, Q))
        ar_poly, ma_poly = oracles.arma_operators(ar, ma, sar, sma, m)
        if oracles.spectral_radius(ar_poly) <= 0.95 and oracles.spectral_radius(ma_poly) <= 0.95:
            break
    order = ModelOrder(p, 0, q, P, 0, Q, m)
    constant = float(rng.normal()) if rng.random() < 0.5 else 0.0
    params = SarimaParams(ar, ma, sar, sma, constant=constant, sigma2=float(rng.uniform(0.2, 5.0)))
    mean = constant / ar_poly.sum()
    n = int(rng.integers(1, 21))
    data = mean + rng.normal(scale=2.0, size=n)
    expected = oracles.gaussian_arma_loglik(data, ar, ma, sar, sma, m, params.sigma2, mean=mean)
    return data, order, params, expected


def test_likelihood_oracle():
    rng = np.random.default_rng(20240501)
    worst = 0.0
    for _ in range(200):
        data, order, params, expected = _random_instance(rng)
        worst = max(worst, abs(log_likelihood(data, order, params) - expected))
    report("likelihood oracle", worst <= 1e-6, f"max |diff| over 200 instances = {worst:.2e} (tol 1e-6)")


def test_aic_back_solve():
    value = aic(-497.03, 7)
    report("AIC back-solve", value == 1008.06, f"aic(-497.03, 7) = {value!r}")


@pytest.mark.xfail(strict=True, reason="z = coef/se = -8.1406 from the rounded se; target needs se ~ 0.10133")
def test_inference_z():
    # z is coef/se by construction; the table value -8.11 was produced from an
    # unrounded standard error (about 0.10133), so this stays red by design.
    row = coefficient_row("ma.L1", -0.8222, 0.101)
    report("inference z", abs(row.z - (-8.11)) <= 0.01, f"z = {row.z:.4f}, target -8.11 +/- 0.01")


def test_inference_ci():
    row = coefficient_row("ma.L1", -0.8222, 0.101)
    ok = abs(row.ci_low - (-1.021)) <= 0.002 and abs(row.ci_high - (-0.624)) <= 0.002
    report("inference CI", ok, f"[{row.ci_low:.4f}, {row.ci_high:.4f}], target [-1.021, -0.624] +/- 0.002")


def test_parameter_recovery():
    order = ModelOrder(1, 0, 0, 1, 0, 0, 12)
    t0 = time.perf_counter()
    y = simulate(order, SarimaParams(ar=[0.5], sar=[0.3], sigma2=1.0), 600, seed=12345)
    f = fit(y, order)
    elapsed = time.perf_counter() - t0
    phi, Phi = f.params.ar[0], f.params.sar[0]
    ok = abs(phi - 0.5) <= 0.1 and abs(Phi - 0.3) <= 0.1 and elapsed < 30
    report("parameter recovery", ok, f"ar {phi:.3f} (0.5), sar {Phi:.3f} (0.3), {elapsed:.1f} s (limit 30 s)")


def test_differencing_round_trip():
    rng = np.random.default_rng(7)
    m = 12
    worst = 0.0
    for _ in range(1000):
        y = rng.normal(scale=100.0, size=int(rng.integers(2 * 12 + 2 + 1, 80))).cumsum()
        for d in range(3):
            for D in range(3):
                head = y[: d + D * m]
                back = integrate(difference(y, d, D, m), d, D, m, head)
                worst = max(worst, float(np.max(np.abs(back - y))))
    report("differencing round trip", worst <= 1e-9, f"max |diff| = {worst:.2e} over 1000 series x 9 orders")


def test_metrics_hand_case():
    r = compute_metrics([100.0, 200.0], [110.0, 190.0])
    got = (r.me, r.mae, r.rmse, r.mpe, r.mape)
    report("metrics hand case", got == (0.0, 10.0, 10.0, -2.5, 7.5), f"ME, MAE, RMSE, MPE, MAPE = {got}")


def test_interval_coverage():
    order, params = ModelOrder(p=1), SarimaParams(ar=[0.7], sigma2=1.0)
    n_hist, h, paths = 60, 12, 2000
    rng = np.random.default_rng(99)
    hits = np.zeros(h)
    for _ in range(paths):
        y = simulate(order, params, n_hist + h, seed=rng).values
        hist = TimeSeries(y[:n_hist], (2000, 1))
        fc = forecast(from_params(hist, order, params), hist, h, 0.95)
        truth = y[n_hist:]
        hits += (fc.lo <= truth) & (truth <= fc.hi)
    coverage = hits / paths
    ok = bool(np.all((coverage >= 0.92) & (coverage <= 0.98)))
    report(
        "interval coverage",
        ok,
        f"horizons 1-12 coverage in [{coverage.min():.3f}, {coverage.max():.3f}] over {paths} paths",
    )


def test_decomposition_identity(monthly):
    rng = np.random.default_rng(3)
    worst_id, worst_sum = 0.0, 0.0
    cases = [monthly] + [TimeSeries(rng.normal(size=int(rng.integers(24, 100))).cumsum(), (2001, 1)) for _ in range(50)]
    for s in cases:
        res = classical_decompose(s)
        ok = res.defined
        worst_id = max(worst_id, float(np.max(np.abs(s.values[ok] - (res.trend + res.seasonal + res.residual)[ok]))))
        worst_sum = max(worst_sum, abs(float(np.sum(res.seasonal[:12]))))
    report(
        "decomposition identity",
        worst_id <= 1e-9 and worst_sum <= 1e-9,
        f"max identity error {worst_id:.2e}, max seasonal cycle sum {worst_sum:.2e}",
    )


def test_pipeline_determinism(quotes_csv, tmp_path):
    blobs = []
    for jobs in (1, 4):
        out = tmp_path / f"jobs{jobs}"
        rc = main(["pipeline", "--input", str(quotes_csv), "--out", str(out), "--grid", "0..1",
                   "--jobs", str(jobs), "--seed", "0"])
        assert rc == 0
        blobs.append((out / "report.json").read_bytes())
    report("pipeline determinism", blobs[0] == blobs[1], f"report.json identical for --jobs 1 and 4 ({len(blobs[0])} bytes)")


NSE_ENV = "NIFTY_SARIMA_NSE_CSV"


@pytest.mark.skipif(not os.environ.get(NSE_ENV), reason=f"set {NSE_ENV} to a daily NIFTY 50 CSV to run")
def test_nse_replication(tmp_path):  # pragma: no cover - needs user-supplied data
    rc = main(["pipeline", "--input", os.environ[NSE_ENV], "--out", str(tmp_path)])
    assert rc == 0
    metrics = json.loads((tmp_path / "report.json").read_text())["holdout"]["metrics"]
    ok = abs(metrics["mape"] - 0.89) <= 0.5 and abs(metrics["rmse"] - 139.67) <= 75
    report("NSE replication", ok, f"MAPE {metrics['mape']:.2f} (0.89 +/- 0.5), RMSE {metrics['rmse']:.2f} (139.67 +/- 75)")
