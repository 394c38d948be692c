"""Command-line entry points: ``kernel``, ``simulate``, ``converge``, ``oracle``."""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from .errors import PeriABCError

BUILTIN_STENCILS = ("beam", "bar")


def _stencil(arg: str):
    from .io import load_stencil
    from .stencil import bar_stencil, beam_stencil

    if arg == "beam":
        return beam_stencil()
    if arg == "bar":
        return bar_stencil()
    return load_stencil(arg)


def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:n`` (inclusive linspace) or comma-separated values."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"grid {spec!r} must be start:stop:n")
        start, stop, n = float(parts[0]), float(parts[1]), int(parts[2])
        return np.linspace(start, stop, n)
    return np.array([float(x) for x in spec.split(",") if x.strip()])


def cmd_kernel(args) -> int:
    from .io import save_tables
    from .kernel_f import solve_f
    from .kernel_g import integrate_g

    gt = integrate_g(_stencil(args.stencil), args.dt, args.t_end)
    kt = solve_f(gt)
    save_tables(args.out, gt, kt)
    print(f"wrote K={kt.K} dt={kt.dt:g} J={kt.steps} to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    from .io import load_config, load_kernels, write_result
    from .simulator import run_scenario

    cfg = load_config(args.config)
    kernels = load_kernels(args.kernels) if args.kernels else None
    res = run_scenario(cfg, kernels=kernels)
    paths = write_result(res, args.out_dir)
    print(f"wrote {len(paths)} files to {args.out_dir}")
    return 0


def cmd_converge(args) -> int:
    from .harness import reproduce_table

    report = reproduce_table(args.table, args.budget, workers=args.workers, time_limit=args.time_limit)
    report.write_csv(args.out)
    print(report.summary())
    return 0 if report.passed else 1


def cmd_oracle(args) -> int:
    from .oracles import QuadratureSpec, analytic_bar, analytic_beam_kernel

    grid = parse_grid(args.grid)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if args.which == "beam-kernel":
            w.writerow(["t", "f"])
            for t, f in zip(grid, analytic_beam_kernel(grid)):
                w.writerow(["%.17g" % t, "%.17g" % f])
        else:
            if args.t is None:
                raise SystemExit("oracle --which bar needs --t")
            spec = QuadratureSpec(tolerance=args.tolerance)
            u = np.atleast_1d(analytic_bar(grid, args.t, args.delta, spec))
            w.writerow(["x", "t", "u"])
            for x, val in zip(grid, u):
                w.writerow(["%.17g" % x, "%.17g" % args.t, "%.17g" % val])
    print(f"wrote {grid.size} rows to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="periabc", description="Semi-discrete peridynamics with exact boundary conditions")
    sub = p.add_subparsers(dest="command", required=True)

    k = sub.add_parser("kernel", help="compute g and f tables for a stencil")
    k.add_argument("--stencil", required=True, help="JSON stencil file or one of: " + ", ".join(BUILTIN_STENCILS))
    k.add_argument("--dt", type=float, required=True)
    k.add_argument("--t-end", type=float, required=True)
    k.add_argument("--out", required=True, help=".npz or .csv")
    k.set_defaults(func=cmd_kernel)

    s = sub.add_parser("simulate", help="run a scenario")
    s.add_argument("--config", required=True)
    s.add_argument("--kernels", help="table written by the kernel command; computed if omitted")
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_simulate)

    c = sub.add_parser("converge", help="reproduce a convergence table")
    c.add_argument("--table", type=int, required=True, choices=range(1, 7), metavar="{1..6}")
    c.add_argument("--budget", choices=("quick", "full"), default="quick")
    c.add_argument("--out", required=True)
    c.add_argument("--workers", type=int, default=1)
    c.add_argument("--time-limit", type=float, default=None, help="seconds")
    c.set_defaults(func=cmd_converge)

    o = sub.add_parser("oracle", help="evaluate an analytic reference on a grid")
    o.add_argument("--which", choices=("bar", "beam-kernel"), required=True)
    o.add_argument("--grid", required=True, help="start:stop:n or comma-separated values (x for bar, t for beam-kernel)")
    o.add_argument("--t", type=float, help="time for the bar solution")
    o.add_argument("--delta", type=float, default=0.25)
    o.add_argument("--tolerance", type=float, default=1e-10)
    o.add_argument("--out", required=True)
    o.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    Path(getattr(args, "out", None) or ".").parent.mkdir(parents=True, exist_ok=True)
    try:
        return args.func(args)
    except PeriABCError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
