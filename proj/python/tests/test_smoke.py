import os
import pathlib

import numpy as np
import pytest

import dshrink

DATA = pathlib.Path(
    os.environ.get("DSHRINK_DATA", pathlib.Path(__file__).resolve().parents[2] / "data")
) / "prostate.csv"


def test_stein_constant():
    assert dshrink.stein_constant(50, 10) == pytest.approx(320 / 42)
    with pytest.raises(dshrink.DomainError):
        dshrink.stein_constant(10, 2)


def test_lasso_orthonormal_closed_form():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((30, 4))
    x -= x.mean(axis=0)
    q, _ = np.linalg.qr(x)
    y = q @ np.array([3.0, -2.0, 0.5, 0.0]) + 0.1 * rng.standard_normal(30)
    lam = 1.5
    fit = dshrink.lasso(q, y, lam, scale=False)
    z = q.T @ (y - y.mean())
    expected = np.sign(z) * np.maximum(np.abs(z) - lam / 2, 0)
    np.testing.assert_allclose(fit["standardized_coefficients"], expected, atol=1e-8)
    assert fit["converged"]


def test_prostate_table_columns():
    x, y, names = dshrink.load_prostate(str(DATA))
    assert x.shape == (97, 8)
    fits = dshrink.fit(x, y, s=0.44)
    assert set(fits) == {"LASSO", "PRSL", "SL2", "SL3_SQRT", "SL3_LOG"}
    lasso = fits["LASSO"]["coefficients"]
    prsl = fits["PRSL"]["coefficients"]
    nonzero = lasso != 0
    np.testing.assert_allclose(prsl[nonzero] / lasso[nonzero], fits["PRSL"]["factor"])
    assert [n for n, v in zip(names, lasso) if v != 0] == ["lcavol", "lweight", "svi"]


def test_simulate_shape_and_reference():
    rows = dshrink.simulate(n=30, p=5, grid_points=2, replications=2, lambda_rule="fixed")
    assert len(rows) == 4
    assert all(r["rmse"] == 1.0 for r in rows if r["estimator"] == "LASSO")


def test_errors_are_python_exceptions():
    with pytest.raises(dshrink.DataError):
        dshrink.load_prostate("/nonexistent.csv")
    with pytest.raises(ValueError):
        dshrink.fit(np.ones((5, 3)), np.ones(5))
