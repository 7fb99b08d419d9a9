import csv
import json

import pytest

from nifty_sarima.cli import main, parse_grid, parse_order, parse_window
from nifty_sarima.errors import ConfigError
from nifty_sarima.sarima import ModelOrder


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_parse_order_forms():
    assert parse_order("2,2,1,2,2,1,12") == ModelOrder(2, 2, 1, 2, 2, 1, 12)
    assert parse_order("(2,2,1)x(2,2,1,12)") == ModelOrder(2, 2, 1, 2, 2, 1, 12)
    assert parse_order("1,1,0") == ModelOrder(1, 1, 0)
    with pytest.raises(ConfigError):
        parse_order("1,2")


def test_parse_grid():
    assert parse_grid(None).size == 729
    assert parse_grid("0..0").size == 1
    g = parse_grid("0..1,d=1,D=1")
    assert g.d == (1,) and g.p == (0, 1) and g.size == 16
    with pytest.raises(ConfigError):
        parse_grid("x=1")


def test_parse_window():
    assert parse_window("2018-01:2018-12") == ((2018, 1), (2018, 12))
    with pytest.raises(ConfigError):
        parse_window("2018-12:2018-01")


class TestIngest:
    def test_full_span(self, quotes_csv, tmp_path, monthly):
        assert main(["ingest", "--input", str(quotes_csv), "--out", str(tmp_path), "--plots"]) == 0
        rows = read_csv(tmp_path / "series.csv")
        assert len(rows) == 132
        assert rows[0]["period"] == "2009-01" and rows[-1]["period"] == "2019-12"
        summary = json.loads((tmp_path / "summary.json").read_text())
        assert summary["n"] == 132
        twin = read_csv(tmp_path / "fig1_series.csv")
        assert [float(r["value"]) for r in twin] == pytest.approx(list(monthly.values), abs=0.01)
        box = read_csv(tmp_path / "fig2_yearly_boxplot.csv")
        assert [r["year"] for r in box] == [str(y) for y in range(2009, 2020)]
        assert all(float(r["min"]) <= float(r["q1"]) <= float(r["median"]) <= float(r["q3"]) <= float(r["max"]) for r in box)
        assert len(read_csv(tmp_path / "fig3_month_overlay.csv")) == 132
        for stem in ("fig1_series", "fig2_yearly_boxplot", "fig3_month_overlay"):
            assert (tmp_path / f"{stem}.svg").read_text().lstrip().startswith("<?xml")

    def test_one_month(self, tmp_path):
        src = tmp_path / "q.csv"
        src.write_text("Date,Close\n2019-03-01,10\n2019-03-04,12\n")
        assert main(["ingest", "--input", str(src), "--out", str(tmp_path / "o")]) == 0
        assert read_csv(tmp_path / "o" / "series.csv") == [{"period": "2019-03", "value": "11.0"}]

    def test_malformed_date_names_line(self, tmp_path, capsys):
        src = tmp_path / "q.csv"
        src.write_text("Date,Close\n2019-03-01,10\nnot-a-date,12\n")
        assert main(["ingest", "--input", str(src), "--out", str(tmp_path / "o")]) == 2
        assert "line 3" in capsys.readouterr().err

    def test_gap_is_data_error(self, tmp_path):
        src = tmp_path / "q.csv"
        src.write_text("Date,Close\n2019-01-02,10\n2019-03-01,12\n")
        assert main(["ingest", "--input", str(src), "--out", str(tmp_path / "o")]) == 2

    def test_missing_input_is_config_error(self, tmp_path):
        assert main(["ingest", "--out", str(tmp_path)]) == 1

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            main(["no-such-command"])
        assert exc.value.code == 1


def test_decompose_command(quotes_csv, tmp_path):
    assert main(["decompose", "--input", str(quotes_csv), "--out", str(tmp_path), "--plots"]) == 0
    rows = read_csv(tmp_path / "decomposition.csv")
    assert list(rows[0]) == ["period", "observed", "trend", "seasonal", "residual"]
    assert rows[0]["trend"] == "" and rows[0]["residual"] == ""
    assert rows[6]["trend"] != ""
    assert (tmp_path / "fig4_decomposition.svg").exists()
    assert read_csv(tmp_path / "fig4_decomposition.csv") == rows


def test_fit_command(quotes_csv, tmp_path, capsys):
    rc = main(["fit", "--input", str(quotes_csv), "--out", str(tmp_path), "--order", "1,1,0,0,1,1,12",
               "--train-end", "2017-12"])
    assert rc == 0
    out = json.loads((tmp_path / "fit.json").read_text())
    assert [c["name"] for c in out["coefficients"]] == ["ar.L1", "ma.S.L12", "sigma2"]
    assert out["n_effective"] == 108 - 13
    assert "P>|z|" in capsys.readouterr().out


def test_select_command(quotes_csv, tmp_path):
    rc = main(["select", "--input", str(quotes_csv), "--out", str(tmp_path), "--grid", "0..1,d=1,D=0..1",
               "--jobs", "1", "--plots"])
    assert rc == 0
    rows = read_csv(tmp_path / "ranking.csv")
    assert list(rows[0]) == ["p", "d", "q", "P", "D", "Q", "m", "k", "loglik", "aic", "converged"]
    assert len(rows) == 32
    summary = json.loads((tmp_path / "selection.json").read_text())
    assert summary["attempted"] == 32
    assert summary["winner"]["aic"] == float(rows[0]["aic"])
    twin = read_csv(tmp_path / "fig8_aic_rank.csv")
    assert [float(r["aic"]) for r in twin] == sorted(float(r["aic"]) for r in twin)


def test_backtest_command(quotes_csv, tmp_path):
    rc = main(["backtest", "--input", str(quotes_csv), "--out", str(tmp_path), "--order", "0,1,0",
               "--window", "2018-01:2018-12", "--plots"])
    assert rc == 0
    rows = read_csv(tmp_path / "backtest.csv")
    assert len(rows) == 12
    for prev, cur in zip(rows, rows[1:]):
        assert float(cur["predicted"]) == pytest.approx(float(prev["actual"]))
    assert read_csv(tmp_path / "fig5_backtest.csv") == rows


def test_validate_and_forecast_commands(quotes_csv, tmp_path):
    order = ["--order", "1,1,0,0,1,1,12"]
    assert main(["validate", "--input", str(quotes_csv), "--out", str(tmp_path), *order, "--plots"]) == 0
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert set(metrics) == {"mape", "me", "mae", "mpe", "rmse", "n"} and metrics["n"] == 6
    assert len(read_csv(tmp_path / "validation.csv")) == 6
    assert main(["forecast", "--input", str(quotes_csv), "--out", str(tmp_path), *order, "--plots"]) == 0
    fc = read_csv(tmp_path / "forecast.csv")
    assert list(fc[0]) == ["period", "point", "lo", "hi"]
    assert [r["period"] for r in fc] == [f"2020-{m:02d}" for m in range(1, 13)]
    twin = read_csv(tmp_path / "fig7_forecast.csv")
    assert [r["point"] for r in twin if r["point"]] == [r["point"] for r in fc]


def test_pipeline_reference_shaped(quotes_csv, tmp_path):
    out = tmp_path / "run"
    rc = main(["pipeline", "--input", str(quotes_csv), "--out", str(out), "--grid", "0..1,d=1,D=1",
               "--jobs", "1", "--plots"])
    assert rc == 0
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "ok"
    assert report["selection"]["attempted"] == 16
    winner = report["selection"]["winner"]
    assert len(winner["order"]) == 7 and isinstance(winner["aic"], float)
    assert set(report["holdout"]["metrics"]) == {"mape", "me", "mae", "mpe", "rmse", "n"}
    assert [r["period"] for r in report["backtest"]["rows"]] == [f"2018-{m:02d}" for m in range(1, 13)]
    assert len(report["holdout"]["rows"]) == 6
    assert len(report["forecast"]["rows"]) == 12
    assert report["forecast"]["rows"][0]["period"] == "2020-01"
    for i in range(1, 9):
        svgs = list(out.glob(f"fig{i}_*.svg"))
        assert len(svgs) == 1 and svgs[0].with_suffix(".csv").exists()
    assert "finished_at" in json.loads((out / "run_meta.json").read_text())
    assert "finished_at" not in (out / "report.json").read_text()


def test_pipeline_white_noise_grid(quotes_csv, tmp_path):
    out = tmp_path / "wn"
    assert main(["pipeline", "--input", str(quotes_csv), "--out", str(out), "--grid", "0..0", "--jobs", "1"]) == 0
    report = json.loads((out / "report.json").read_text())
    assert report["selection"]["winner"]["order"] == [0, 0, 0, 0, 0, 0, 12]


def test_pipeline_overlapping_windows(quotes_csv, tmp_path):
    out = tmp_path / "bad"
    rc = main(["pipeline", "--input", str(quotes_csv), "--out", str(out), "--grid", "0..0",
               "--train-end", "2019-02", "--backtest", "2019-03:2019-04", "--holdout", "2019-01:2019-06"])
    assert rc == 1
    report = json.loads((out / "report.json").read_text())
    assert report["status"] == "failed" and "ConfigError" in report["error"]
