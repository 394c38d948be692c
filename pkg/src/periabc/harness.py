"""Error norms, convergence rates and the published convergence tables.

``reproduce_table`` reruns one table's sweep, compares every cell with the
published value and returns a :class:`ConvergenceReport` carrying the
pass/fail checks.
"""
from __future__ import annotations

import csv
import io
import math
import time as _time
import warnings
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass, field

import numpy as np

from .errors import FitError, ShapeError, UnknownTableError

PI = math.pi
BAND = 3.0  # allowed factor between reproduced and published errors
RATE_BAND = (1.9, 2.1)
KERNEL_MIN_RATE = 2.0
AMPLIFICATION_BAND = (1.8, 2.1)
ROUNDOFF = 1e-11
BUDGETS = ("quick", "full")


def linf_error(a, b) -> float:
    """``max |a - b|`` over matching entries."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ShapeError(f"shapes differ: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def fit_rate(dts, errors) -> float:
    """Least-squares slope of ``log(error)`` against ``log(dt)``.

    Non-positive errors are dropped with a warning.
    """
    dts = np.asarray(dts, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if dts.shape != errors.shape:
        raise ShapeError(f"{dts.size} steps but {errors.size} errors")
    keep = np.isfinite(errors) & (errors > 0) & (dts > 0)
    if not keep.all():
        warnings.warn(f"dropping {int((~keep).sum())} non-positive error(s) from the rate fit", RuntimeWarning)
    if keep.sum() < 2:
        raise FitError("need at least two positive errors to fit a rate")
    x = np.log(dts[keep])
    y = np.log(errors[keep])
    return float(np.polyfit(x, y, 1)[0])


def pairwise_rates(dts, errors) -> np.ndarray:
    """Rates between consecutive entries, ``log(e_{i+1}/e_i) / log(dt_{i+1}/dt_i)``."""
    dts = np.asarray(dts, dtype=float)
    errors = np.asarray(errors, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(errors[1:] / errors[:-1]) / np.log(dts[1:] / dts[:-1])


@dataclass(frozen=True)
class PublishedTable:
    id: int
    quantity: str
    scenario: str
    times: tuple
    dts: tuple
    values: tuple
    rates: tuple
    excluded: frozenset = frozenset()  # (time index, dt index) of suspected typos
    quick_times: tuple | None = None
    full_times: tuple | None = None
    caption: str = ""

    def value(self, t: float, dt: float) -> float:
        return self.values[self.times.index(t)][self.dts.index(dt)]

    def is_excluded(self, t: float, dt: float) -> bool:
        return (self.times.index(t), self.dts.index(dt)) in self.excluded


_SCENARIO_DTS = (0.001, 0.002, 0.0025, 0.004, 0.005)
_QUICK_DTS = (0.0025, 0.005)
_KERNEL_DTS = tuple(3 * PI / n for n in (500, 400, 250, 200))

PUBLISHED_TABLES = {
    1: PublishedTable(
        1, "kernel", "beam-kernel",
        times=(3 * PI, 18 * PI, 300 * PI, 3000 * PI),
        dts=_KERNEL_DTS,
        values=(
            (9.26e-06, 1.63e-05, 4.79e-05, 7.88e-04),
            (9.31e-07, 1.71e-06, 5.92e-06, 1.11e-05),
            (3.80e-08, 8.71e-08, 5.15e-07, 1.24e-06),
            (8.51e-09, 2.16e-08, 1.52e-07, 3.93e-07),
        ),
        rates=(2.32, 2.69, 3.80, 4.17),
        excluded=frozenset({(0, 3)}),
        quick_times=(3 * PI, 18 * PI),
        full_times=(3 * PI, 18 * PI, 300 * PI),
        caption="beam kernel error at time t, all f_n^m",
    ),
    2: PublishedTable(
        2, "displacement", "bar",
        times=(5.0, 10.0, 15.0, 40.0),
        dts=_SCENARIO_DTS,
        values=(
            (4.03e-07, 1.61e-06, 2.51e-06, 2.51e-06, 1.01e-05),
            (1.06e-06, 4.26e-06, 6.65e-06, 1.70e-05, 2.66e-05),
            (7.57e-07, 3.02e-06, 4.72e-06, 1.21e-05, 1.88e-05),
            (1.67e-09, 6.69e-09, 1.04e-08, 2.67e-08, 4.17e-08),
        ),
        rates=(2.00, 2.00, 1.99, 2.00),
        caption="Gaussian bar, displacement",
    ),
    3: PublishedTable(
        3, "velocity", "bar",
        times=(5.0, 10.0, 15.0, 40.0),
        dts=_SCENARIO_DTS,
        values=(
            (9.87e-07, 3.94e-06, 6.16e-06, 1.57e-05, 2.46e-05),
            (2.25e-06, 9.03e-06, 1.41e-05, 3.61e-05, 5.64e-05),
            (7.94e-07, 3.17e-06, 4.96e-06, 1.26e-05, 1.98e-05),
            (8.87e-09, 3.54e-08, 5.54e-08, 1.41e-07, 2.21e-07),
        ),
        rates=(2.00, 2.00, 2.00, 2.00),
        caption="Gaussian bar, velocity",
    ),
    4: PublishedTable(
        4, "displacement", "interface-0.5",
        times=(10.0, 15.0, 40.0, 100.0),
        dts=_SCENARIO_DTS,
        values=(
            (2.33e-07, 9.34e-07, 1.46e-06, 3.73e-06, 5.84e-06),
            (6.39e-07, 2.55e-06, 3.99e-06, 1.02e-05, 1.59e-05),
            (2.33e-07, 9.33e-06, 1.45e-06, 3.72e-06, 5.82e-06),
            (9.78e-11, 3.9e-10, 6.11e-10, 1.56e-09, 2.43e-09),
        ),
        rates=(2.00, 2.00, 2.00, 2.00),
        excluded=frozenset({(2, 1)}),
        caption="composite bar, beta = 0.5, displacement",
    ),
    5: PublishedTable(
        5, "displacement", "interface-0.1",
        times=(10.0, 15.0, 40.0, 100.0),
        dts=_SCENARIO_DTS,
        values=(
            (2.44e-08, 9.76e-08, 1.52e-07, 3.90e-07, 6.10e-07),
            (7.90e-08, 3.16e-07, 4.93e-07, 1.26e-06, 1.97e-06),
            (8.13e-07, 3.25e-06, 5.08e-06, 1.30e-05, 2.03e-05),
            (3.90e-07, 1.56e-06, 2.44e-06, 6.24e-06, 9.75e-06),
        ),
        rates=(2.00, 2.00, 2.00, 2.00),
        caption="composite bar, beta = 0.1, displacement",
    ),
    6: PublishedTable(
        6, "displacement", "seismic",
        times=(10.0, 15.0, 40.0, 100.0),
        dts=_SCENARIO_DTS,
        values=(
            (8.46e-07, 3.38e-06, 5.29e-06, 1.35e-05, 2.11e-05),
            (2.78e-06, 1.11e-05, 1.74e-05, 4.45e-05, 6.96e-05),
            (1.38e-06, 5.55e-06, 8.67e-06, 2.21e-05, 3.47e-05),
            (1.11e-06, 4.49e-06, 7.03e-06, 1.82e-05, 2.87e-05),
        ),
        rates=(2.00, 2.00, 2.00, 2.02),
        caption="Ricker source, exact left end, free right end, displacement",
    ),
}


def published_table(table_id: int) -> PublishedTable:
    try:
        return PUBLISHED_TABLES[int(table_id)]
    except (KeyError, ValueError, TypeError):
        raise UnknownTableError(f"no table {table_id!r}; known tables are {sorted(PUBLISHED_TABLES)}") from None


def budget_grid(table: PublishedTable, budget: str):
    """Times and steps swept under ``budget``, steps sorted ascending."""
    if budget not in BUDGETS:
        raise ValueError(f"budget must be one of {BUDGETS}, got {budget!r}")
    if table.id == 1:
        times = table.quick_times if budget == "quick" else table.full_times
        dts = table.dts
    else:
        times = table.times
        dts = _QUICK_DTS if budget == "quick" else table.dts
    return tuple(times), tuple(sorted(dts))


# -- sweeps ----------------------------------------------------------------

_KERNELS: dict = {}


def cached_kernels(stencil, dt: float, T: float):
    """Boundary kernels reused across scenarios sharing ``(stencil, dt)``."""
    from .kernel_f import solve_f
    from .kernel_g import integrate_g

    key = (tuple(stencil.a), float(dt))
    steps = int(round(T / dt))
    kt = _KERNELS.get(key)
    if kt is None or kt.steps < steps:
        kt = solve_f(integrate_g(stencil, dt, max(T, dt)))
        _KERNELS[key] = kt
    return kt


def scenario_config(name: str, dt: float):
    from .simulator import bar_config, interface_config, seismic_config

    if name == "bar":
        return bar_config(dt)
    if name.startswith("interface-"):
        return interface_config(float(name.split("-", 1)[1]), dt)
    if name == "seismic":
        return seismic_config(dt)
    raise UnknownTableError(f"unknown scenario {name!r}")


def amplification_ratio(result) -> float:
    """Right-end peak over the incident peak recorded at the first extra probe."""
    incident = np.abs(result.probes[:, 4]).max()
    return float(np.abs(result.probe("u_right")).max() / incident)


def scenario_errors(name: str, dt: float) -> dict:
    """Errors of one truncated run against the enlarged-domain reference."""
    from .oracles import enlarged_reference
    from .simulator import run_scenario

    cfg = scenario_config(name, dt)
    kernels = cached_kernels(cfg.stencil, dt, cfg.time.t_end)
    res = run_scenario(cfg, kernels=kernels)
    ref = enlarged_reference(cfg)
    out = {"displacement": {}, "velocity": {}, "left_end": {}}
    for t in cfg.time.snapshots:
        u, v = res.snapshots[t]
        ur, vr = ref[t]
        out["displacement"][t] = linf_error(u, ur)
        out["velocity"][t] = linf_error(v, vr)
        out["left_end"][t] = abs(float(u[0] - ur[0]))
    out["amplification"] = amplification_ratio(res) if cfg.source is not None else None
    return out


def kernel_errors(times, dt: float, exact: np.ndarray) -> np.ndarray:
    """Max over all ``f_n^m`` of the beam kernel error at each of ``times``."""
    from .kernel_f import solve_f
    from .kernel_g import integrate_g
    from .stencil import beam_stencil

    kt = solve_f(integrate_g(beam_stencil(), dt, max(times)))
    out = np.empty(len(times))
    for i, t in enumerate(times):
        j = int(round(t / dt))
        out[i] = np.abs(kt.f[:, :, j] - exact[:, :, i]).max()
    return out


def _run_jobs(fn, jobs, workers: int, deadline: float | None) -> dict:
    """``{index: fn(*jobs[index])}``; stops early once ``deadline`` has passed."""
    results = {}
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(fn, *job) for job in jobs]
            for i, fut in enumerate(futures):
                remaining = None if deadline is None else max(deadline - _time.monotonic(), 0.0)
                try:
                    results[i] = fut.result(timeout=remaining)
                except FutureTimeout:
                    for f in futures:
                        f.cancel()
                    break
        return results
    for i, job in enumerate(jobs):
        if deadline is not None and _time.monotonic() > deadline:
            break
        results[i] = fn(*job)
    return results


# -- reports ---------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  {self.detail}".rstrip()


@dataclass
class ConvergenceReport:
    table_id: int
    quantity: str
    times: tuple
    dts: tuple
    errors: np.ndarray
    published: np.ndarray
    fitted_rate: np.ndarray
    pairwise: np.ndarray
    reference: str
    budget: str = "quick"
    incomplete: bool = False
    checks: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.incomplete and all(c.passed for c in self.checks)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["table", "quantity", "t", "dt", "error", "published_error", "ratio_to_published", "fitted_rate", "pairwise_rate"])
        for i, t in enumerate(self.times):
            for k, dt in enumerate(self.dts):
                e, p = self.errors[i, k], self.published[i, k]
                w.writerow([
                    self.table_id,
                    self.quantity,
                    f"{t:.12g}",
                    f"{dt:.12g}",
                    _fmt(e),
                    _fmt(p),
                    _fmt(e / p if np.isfinite(p) and p > 0 else np.nan, "%.4f"),
                    _fmt(self.fitted_rate[i], "%.4f"),
                    "" if k == 0 else _fmt(self.pairwise[i, k - 1], "%.4f"),
                ])
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write(self.to_csv())

    def summary(self) -> str:
        head = f"table {self.table_id} ({self.quantity}, {self.budget})"
        if self.incomplete:
            head += " INCOMPLETE"
        return "\n".join([head, *(c.line() for c in self.checks)])


def _fmt(x, pattern: str = "%.6e") -> str:
    return "" if x is None or not np.isfinite(x) else pattern % x


def _assess(report: ConvergenceReport, table: PublishedTable) -> None:
    checks = report.checks
    for i, t in enumerate(report.times):
        row = report.errors[i]
        for k, dt in enumerate(report.dts):
            if not np.isfinite(row[k]) or table.is_excluded(t, dt):
                continue
            p = report.published[i, k]
            ok = p / BAND <= row[k] <= p * BAND
            checks.append(Check(f"t={t:.6g} dt={dt:.6g} error", bool(ok), f"{row[k]:.3e} vs {p:.3e}"))
        done = np.isfinite(row)
        if table.id == 1:
            cols = [k for k, dt in enumerate(report.dts) if done[k] and not table.is_excluded(t, dt)]
            cols = [k for k in cols if report.dts[k] < _KERNEL_DTS[-1] - 1e-15]
            if len(cols) >= 2:
                r = fit_rate(np.asarray(report.dts)[cols], row[cols])
                checks.append(Check(f"t={t:.6g} fitted rate", r >= KERNEL_MIN_RATE, f"{r:.3f} >= {KERNEL_MIN_RATE}"))
        else:
            lo, hi = RATE_BAND
            if done.sum() >= 2:
                r = report.fitted_rate[i]
                checks.append(Check(f"t={t:.6g} fitted rate", bool(lo <= r <= hi), f"{r:.3f} in [{lo}, {hi}]"))
            for k, r in enumerate(report.pairwise[i]):
                if np.isfinite(r):
                    name = f"t={t:.6g} pairwise rate dt={report.dts[k]:.6g}/{report.dts[k + 1]:.6g}"
                    checks.append(Check(name, bool(lo <= r <= hi), f"{r:.3f} in [{lo}, {hi}]"))
        # error must not grow as dt shrinks, up to roundoff
        finite = row[done]
        rises = np.diff(finite) < 0  # ascending dt: error should increase
        bad = [k for k in np.nonzero(rises)[0] if finite[k] - finite[k + 1] > ROUNDOFF]
        checks.append(Check(f"t={t:.6g} monotone refinement", not bad, "" if not bad else f"{len(bad)} inversion(s)"))
    amp = report.extras.get("amplification")
    if amp:
        lo, hi = AMPLIFICATION_BAND
        for dt, r in sorted(amp.items()):
            checks.append(Check(f"dt={dt:.6g} amplification ratio", bool(lo <= r <= hi), f"{r:.3f} in [{lo}, {hi}]"))
    if report.incomplete:
        checks.append(Check("budget", False, "time limit reached before the sweep finished"))


def reproduce_table(table_id: int, budget: str = "quick", workers: int = 1, time_limit: float | None = None) -> ConvergenceReport:
    """Rerun one published table and check it against the acceptance tolerances.

    Parameters
    ----------
    table_id : int
        1 (beam kernels) to 6 (Ricker source).
    budget : {"quick", "full"}
        ``quick`` keeps the two coarsest scenario steps and the two shortest
        kernel times; ``full`` runs every tabulated step.  The ``t = 3000 pi``
        kernel row is tabulated but never run.
    workers : int
        Independent runs are spread over this many processes.
    time_limit : float, optional
        Wall-clock seconds; unfinished cells are left empty and the report is
        flagged incomplete.
    """
    table = published_table(table_id)
    times, dts = budget_grid(table, budget)
    deadline = None if time_limit is None else _time.monotonic() + time_limit
    errors = np.full((len(times), len(dts)), np.nan)
    published = np.array([[table.value(t, dt) for dt in dts] for t in times])
    extras: dict = {}

    if table.id == 1:
        from .oracles import chain_kernels
        from .stencil import beam_stencil

        exact = chain_kernels(beam_stencil(), times)
        done = _run_jobs(kernel_errors, [(times, dt, exact) for dt in dts], workers, deadline)
        for k in done:
            errors[:, k] = done[k]
        reference = "exact modal solution of the clamped half-chain; equals 2 J1(2t) sin(2t)/t for f_0^1"
    else:
        jobs = [(table.scenario, dt) for dt in dts]
        done = _run_jobs(_cached_scenario_errors, jobs, workers, deadline)
        left, amp = {}, {}
        for k, dt in enumerate(dts):
            res = done.get(k)
            if res is None:
                continue
            errors[:, k] = [res[table.quantity][t] for t in times]
            left[dt] = [res["left_end"][t] for t in times]
            if res["amplification"] is not None:
                amp[dt] = res["amplification"]
        if table.scenario == "seismic":
            extras["left_end"] = left
            extras["amplification"] = amp
        reference = "enlarged free-ended chain, exact in time (Chebyshev propagation after the source phase)"

    fitted = np.full(len(times), np.nan)
    pair = np.full((len(times), len(dts) - 1), np.nan)
    for i in range(len(times)):
        ok = np.isfinite(errors[i]) & (errors[i] > 0)
        ok &= [not table.is_excluded(times[i], dt) for dt in dts]
        if ok.sum() >= 2:
            fitted[i] = fit_rate(np.asarray(dts)[ok], errors[i][ok])
        pair[i] = pairwise_rates(dts, errors[i])
    report = ConvergenceReport(
        table_id=table.id,
        quantity=table.quantity,
        times=times,
        dts=dts,
        errors=errors,
        published=published,
        fitted_rate=fitted,
        pairwise=pair,
        reference=reference,
        budget=budget,
        incomplete=bool(np.isnan(errors).any()),
        extras=extras,
    )
    _assess(report, table)
    return report


_SCENARIO_RESULTS: dict = {}


def _cached_scenario_errors(name: str, dt: float) -> dict:
    key = (name, float(dt))
    if key not in _SCENARIO_RESULTS:
        _SCENARIO_RESULTS[key] = scenario_errors(name, dt)
    return _SCENARIO_RESULTS[key]
