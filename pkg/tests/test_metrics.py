import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from nifty_sarima.errors import DataError
from nifty_sarima.metrics import compute_metrics

positive = st.floats(1.0, 1e5, allow_nan=False)


def test_perfect_forecast():
    r = compute_metrics([10.0, 20.0, 30.0], [10.0, 20.0, 30.0])
    assert (r.mape, r.me, r.mae, r.mpe, r.rmse, r.n) == (0, 0, 0, 0, 0, 3)


def test_hand_case():
    r = compute_metrics([100.0, 200.0], [110.0, 190.0])
    assert (r.me, r.mae, r.rmse, r.mpe, r.mape) == (0.0, 10.0, 10.0, -2.5, 7.5)


def test_forecasts_above_actuals_give_negative_me():
    r = compute_metrics([11000.0, 11200.0], [11050.0, 11230.0])
    assert r.me < 0 and r.mpe < 0


def test_length_mismatch():
    with pytest.raises(DataError):
        compute_metrics([1.0, 2.0], [1.0])


def test_zero_actual():
    with pytest.raises(DataError):
        compute_metrics([0.0, 2.0], [1.0, 2.0])


def test_text_mirrors_table2_layout():
    text = compute_metrics([100.0, 200.0], [110.0, 190.0]).to_text()
    lines = text.splitlines()
    assert lines[0].startswith("Mean Absolute Percentage Error") and lines[0].split()[-2:] == ["MAPE", "7.50"]
    assert lines[-1].split()[-2:] == ["RMSE", "10.00"]
    assert json.loads(compute_metrics([1.0], [2.0]).to_json())["n"] == 1


@given(st.lists(st.tuples(positive, positive), min_size=1, max_size=30), st.floats(0.01, 100))
def test_invariants(pairs, c):
    actual = np.array([a for a, _ in pairs])
    pred = np.array([p for _, p in pairs])
    r = compute_metrics(actual, pred)
    assert r.mae >= abs(r.me) - 1e-9 * r.mae
    assert r.rmse >= r.mae * (1 - 1e-12)
    assert r.mape >= abs(r.mpe) - 1e-9 * r.mape

    swapped = compute_metrics(pred, actual)
    assert swapped.mae == pytest.approx(r.mae)
    assert swapped.rmse == pytest.approx(r.rmse)

    scaled = compute_metrics(c * actual, c * pred)
    assert scaled.me == pytest.approx(c * r.me, rel=1e-9, abs=1e-9)
    assert scaled.mae == pytest.approx(c * r.mae, rel=1e-9)
    assert scaled.rmse == pytest.approx(c * r.rmse, rel=1e-9)
    assert scaled.mape == pytest.approx(r.mape, rel=1e-9)
    assert scaled.mpe == pytest.approx(r.mpe, rel=1e-9, abs=1e-9)

    perm = np.random.default_rng(len(pairs)).permutation(len(pairs))
    permuted = compute_metrics(actual[perm], pred[perm])
    assert permuted.rmse == pytest.approx(r.rmse) and permuted.mape == pytest.approx(r.mape)


def test_swapping_negates_signed_metrics_on_common_denominator():
    # ME flips sign exactly when actual and predicted swap
    r = compute_metrics([100.0, 200.0], [110.0, 180.0])
    s = compute_metrics([110.0, 180.0], [100.0, 200.0])
    assert s.me == -r.me
