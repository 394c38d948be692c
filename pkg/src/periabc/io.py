"""Reading and writing stencils, kernel tables, scenarios and run output.

Tables are stored as ``.npz`` (exact) or ``.csv`` (readable).  Both carry
the header ``K, dt, J`` and the stencil coefficients so that a table can be
checked against the run that loads it.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .kernel_f import KernelTable
from .kernel_g import GreensTable
from .stencil import StencilCoefficients

FLOAT = "%.17g"


def save_stencil(s: StencilCoefficients, path) -> None:
    Path(path).write_text(json.dumps(s.to_dict(), indent=2) + "\n")


def load_stencil(path) -> StencilCoefficients:
    return StencilCoefficients.from_dict(json.loads(Path(path).read_text()))


def _header_rows(K: int, dt: float, J: int, a) -> list:
    return [["K", "dt", "J"], [K, FLOAT % dt, J], ["a", *(FLOAT % x for x in a)]]


def _read_header(rows):
    if rows[0][:3] != ["K", "dt", "J"] or rows[2][0] != "a":
        raise ConfigurationError("not a kernel table file: missing K, dt, J header")
    K, dt, J = int(rows[1][0]), float(rows[1][1]), int(rows[1][2])
    stencil = StencilCoefficients([float(x) for x in rows[2][1:]])
    if stencil.K != K:
        raise ConfigurationError(f"header says K={K} but the stencil has K={stencil.K}")
    return K, dt, J, stencil


def save_tables(path, gt: GreensTable | None = None, kt: KernelTable | None = None) -> None:
    """Write the Green's table and/or kernel table to ``path`` (``.npz`` or ``.csv``)."""
    base = gt if gt is not None else kt
    if base is None:
        raise ConfigurationError("nothing to save")
    path = Path(path)
    K, dt = base.K, base.dt
    J = base.steps
    if path.suffix == ".npz":
        data = {"K": K, "dt": dt, "J": J, "a": base.stencil.a}
        if gt is not None:
            data.update(g=gt.g, gdot=gt.gdot)
        if kt is not None:
            data.update(f=kt.f)
        np.savez(path, **data)
        return
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerows(_header_rows(K, dt, J, base.stencil.a))
        if gt is not None:
            for m in range(2 * K):
                w.writerow(["g", m, "", *(FLOAT % x for x in gt.g[m])])
            for m in range(2 * K):
                w.writerow(["gdot", m, "", *(FLOAT % x for x in gt.gdot[m])])
        if kt is not None:
            for m in range(1, K + 1):
                for p in range(K):
                    w.writerow(["f", m, -p, *(FLOAT % x for x in kt.f[m - 1, p])])


def load_tables(path):
    """Return ``(GreensTable or None, KernelTable or None)``."""
    path = Path(path)
    if path.suffix == ".npz":
        with np.load(path) as z:
            stencil = StencilCoefficients(z["a"])
            dt = float(z["dt"])
            gt = GreensTable(dt, z["g"], z["gdot"], stencil) if "g" in z else None
            kt = KernelTable(dt, z["f"], stencil) if "f" in z else None
        return gt, kt
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    K, dt, J, stencil = _read_header(rows)
    g = np.zeros((2 * K, J + 1))
    gdot = np.zeros((2 * K, J + 1))
    f = np.zeros((K, K, J + 1))
    seen = set()
    for row in rows[3:]:
        tag, m, n = row[0], int(row[1]), row[2]
        vals = np.array([float(x) for x in row[3:]])
        if vals.size != J + 1:
            raise ConfigurationError(f"row {tag} {m} has {vals.size} samples, expected {J + 1}")
        if tag == "g":
            g[m] = vals
        elif tag == "gdot":
            gdot[m] = vals
        elif tag == "f":
            f[m - 1, -int(n)] = vals
        else:
            raise ConfigurationError(f"unknown row tag {tag!r}")
        seen.add(tag)
    gt = GreensTable(dt, g, gdot, stencil) if "g" in seen else None
    kt = KernelTable(dt, f, stencil) if "f" in seen else None
    return gt, kt


def load_kernels(path) -> KernelTable:
    _, kt = load_tables(path)
    if kt is None:
        raise ConfigurationError(f"{path} holds no boundary kernels")
    return kt


def save_config(config, path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2) + "\n")


def load_config(path):
    from .simulator import ScenarioConfig

    return ScenarioConfig.from_dict(json.loads(Path(path).read_text()))


def write_snapshot(path, x, u, v) -> None:
    """Columns ``node, x, u, v`` with 1-based node numbers."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "x", "u", "v"])
        for i, (xi, ui, vi) in enumerate(zip(x, u, v), start=1):
            w.writerow([i, "%.10g" % xi, FLOAT % ui, FLOAT % vi])


def write_probes(path, result) -> None:
    """Probe histories; the first four columns are ``t, u_origin, u_left, u_right``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(list(result.probe_names))
        for row in result.probes:
            w.writerow([FLOAT % x for x in row])


def read_csv_columns(path) -> dict:
    """``{column: array}`` for a numeric CSV with a header row."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    cols = rows[0]
    data = np.array([[float(x) for x in r] for r in rows[1:]]) if len(rows) > 1 else np.zeros((0, len(cols)))
    return {c: data[:, i] for i, c in enumerate(cols)}


def write_result(result, out_dir) -> list:
    """Snapshot and probe CSVs of a run; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for t, (u, v) in sorted(result.snapshots.items()):
        p = out / f"snapshot_t{t:g}.csv"
        write_snapshot(p, result.x, u, v)
        paths.append(p)
    p = out / "probes.csv"
    write_probes(p, result)
    paths.append(p)
    return paths
