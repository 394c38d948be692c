import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from periabc.errors import FitError, ShapeError, UnknownTableError
from periabc.harness import (
    PUBLISHED_TABLES,
    ConvergenceReport,
    _assess,
    budget_grid,
    fit_rate,
    linf_error,
    pairwise_rates,
    published_table,
    reproduce_table,
)


def test_linf_examples():
    assert linf_error([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
    assert linf_error([0.0, 1.0], [0.0, 0.0]) == 1.0
    assert linf_error([], []) == 0.0
    with pytest.raises(ShapeError):
        linf_error([0.0, 1.0], [0.0])


@settings(max_examples=30, deadline=None)
@given(c=st.floats(1e-6, 1e3), p=st.floats(0.5, 6.0))
def test_fit_recovers_power_law(c, p):
    dts = np.array([0.001, 0.002, 0.0025, 0.004, 0.005])
    assert fit_rate(dts, c * dts**p) == pytest.approx(p, abs=1e-9)


def test_fit_synthetic_orders():
    dts = np.array([0.01, 0.005, 0.0025])
    assert fit_rate(dts, 3.0 * dts**2) == pytest.approx(2.0, abs=1e-12)
    assert fit_rate(dts, 0.1 * dts**4) == pytest.approx(4.0, abs=1e-12)


def test_fit_published_row():
    t2 = PUBLISHED_TABLES[2]
    # the dt = 0.004 entry of the t = 5 row repeats the dt = 0.0025 entry
    keep = [0, 1, 2, 4]
    dts = np.array(t2.dts)[keep]
    errs = np.array(t2.values[0])[keep]
    assert fit_rate(dts, errs) == pytest.approx(2.00, abs=0.01)
    for row, rate in zip(t2.values[1:], t2.rates[1:]):
        assert fit_rate(t2.dts, row) == pytest.approx(rate, abs=0.01)


def test_fit_drops_bad_entries():
    dts = [0.001, 0.002, 0.004]
    with pytest.warns(RuntimeWarning):
        r = fit_rate(dts, [0.0, 4e-6, 1.6e-5])
    assert r == pytest.approx(2.0)
    with pytest.warns(RuntimeWarning), pytest.raises(FitError):
        fit_rate(dts, [0.0, -1.0, 1.6e-5])
    with pytest.raises(FitError):
        fit_rate([0.1], [1.0])
    with pytest.raises(ShapeError):
        fit_rate([0.1, 0.2], [1.0])


def test_pairwise_rates():
    dts = np.array([0.001, 0.002, 0.004])
    assert np.allclose(pairwise_rates(dts, 5 * dts**2), 2.0)


def test_unknown_table():
    for bad in (7, 0, "x"):
        with pytest.raises(UnknownTableError):
            published_table(bad)
    with pytest.raises(UnknownTableError):
        reproduce_table(7)


def test_published_tables():
    assert sorted(PUBLISHED_TABLES) == [1, 2, 3, 4, 5, 6]
    assert PUBLISHED_TABLES[1].value(3 * math.pi, 3 * math.pi / 500) == 9.26e-06
    assert PUBLISHED_TABLES[1].is_excluded(3 * math.pi, 3 * math.pi / 200)
    assert PUBLISHED_TABLES[4].is_excluded(40.0, 0.002)
    assert PUBLISHED_TABLES[5].value(40.0, 0.005) == 2.03e-05
    assert PUBLISHED_TABLES[6].value(10.0, 0.005) == 2.11e-05


def test_budget_grid():
    times, dts = budget_grid(PUBLISHED_TABLES[2], "quick")
    assert times == (5.0, 10.0, 15.0, 40.0) and dts == (0.0025, 0.005)
    times, dts = budget_grid(PUBLISHED_TABLES[1], "quick")
    assert times == (3 * math.pi, 18 * math.pi) and len(dts) == 4
    times, _ = budget_grid(PUBLISHED_TABLES[1], "full")
    assert 3000 * math.pi not in times
    assert budget_grid(PUBLISHED_TABLES[6], "full")[1] == (0.001, 0.002, 0.0025, 0.004, 0.005)
    with pytest.raises(ValueError):
        budget_grid(PUBLISHED_TABLES[2], "overnight")


def _synthetic(table, errors):
    times, dts = budget_grid(table, "full")
    published = np.array([[table.value(t, dt) for dt in dts] for t in times])
    errors = np.asarray(errors, dtype=float)
    fitted = np.array([fit_rate(dts, e) for e in errors])
    report = ConvergenceReport(
        table.id, table.quantity, times, dts, errors, published, fitted,
        np.array([pairwise_rates(dts, e) for e in errors]), "synthetic", budget="full",
    )
    _assess(report, table)
    return report


def test_assess_accepts_clean_second_order():
    table = PUBLISHED_TABLES[3]
    dts = np.array(budget_grid(table, "full")[1])
    errors = [row[-1] * (dts / 0.005) ** 2 for row in table.values]
    assert _synthetic(table, errors).passed


def test_assess_flags_inversion():
    table = PUBLISHED_TABLES[3]
    dts = np.array(budget_grid(table, "full")[1])
    errors = [row[-1] * (dts / 0.005) ** 2 for row in table.values]
    errors[0] = errors[0].copy()
    errors[0][0], errors[0][1] = errors[0][1], errors[0][0]
    report = _synthetic(table, errors)
    failed = [c.name for c in report.checks if not c.passed]
    assert "t=5 monotone refinement" in failed


def test_assess_tolerates_roundoff_inversion():
    table = PUBLISHED_TABLES[3]
    dts = np.array(budget_grid(table, "full")[1])
    errors = [row[-1] * (dts / 0.005) ** 2 for row in table.values]
    errors[3] = errors[3].copy()
    errors[3][0] = errors[3][1] + 5e-12
    checks = {c.name: c.passed for c in _synthetic(table, errors).checks}
    assert checks["t=40 monotone refinement"]


def test_table1_report_is_deterministic():
    a = reproduce_table(1, "quick")
    b = reproduce_table(1, "quick")
    assert a.to_csv().encode() == b.to_csv().encode()
    assert a.passed, a.summary()
    header = a.to_csv().splitlines()[0].split(",")
    assert header == ["table", "quantity", "t", "dt", "error", "published_error", "ratio_to_published", "fitted_rate", "pairwise_rate"]


def test_time_limit_marks_incomplete(tmp_path):
    report = reproduce_table(1, "quick", time_limit=0.0)
    assert report.incomplete and not report.passed
    assert "INCOMPLETE" in report.summary()
    path = tmp_path / "t1.csv"
    report.write_csv(path)
    rows = path.read_text().splitlines()[1:]
    assert rows and all(r.split(",")[4] == "" for r in rows)


def test_parallel_matches_serial():
    serial = reproduce_table(1, "quick")
    parallel = reproduce_table(1, "quick", workers=2)
    assert serial.to_csv() == parallel.to_csv()


def test_errors_are_non_negative():
    report = reproduce_table(1, "quick")
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert np.all(report.errors >= 0)
