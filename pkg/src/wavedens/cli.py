"""Command-line entry point.

Subcommands mirror the library layers: basis tables, localized kernel
sections, density estimates, increment functions, limit-set intervals, and
the two Monte Carlo experiments.  Exit codes: 0 success, 1 experiment
predicate failure, 2 I/O or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .basis import build_family
from .errors import ConfigurationError, NumericalError
from .estimator import evaluate, expected_estimator, fit, make_grid
from .experiments import (ExperimentConfig, emit_report, run_theorem1,
                          run_theorem2)
from .increments import g_n_x, g_tilde_n_x
from .kernel import ProjectionKernel, cell_lower_corners, localize
from .limitsets import gamma_interval
from .sampling import SeedSpec, draw, make_density


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _write_csv(path: str, header: str, rows):
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def _cmd_basis(args) -> int:
    sf = build_family(args.family, args.depth)
    a, _ = sf.support
    xs = a + np.arange(len(sf.values)) * 2.0 ** -sf.table_depth
    _write_csv(args.emit, "x,phi",
               ([_fmt(x), _fmt(v)] for x, v in zip(xs, sf.values)))
    return 0


def _cmd_kernel(args) -> int:
    basis = build_family(args.family)
    pk = ProjectionKernel(basis, args.dim)
    center = np.asarray([float(v) for v in args.center.split(",")])
    lk = localize(pk, args.level, center, args.step)
    corners = cell_lower_corners(lk)
    cells = lk.cell_values().ravel()
    header = ",".join(f"s_{i + 1}" for i in range(args.dim)) + ",ktilde"
    _write_csv(args.emit, header,
               ([_fmt(c) for c in corner] + [_fmt(v)]
                for corner, v in zip(corners, cells)))
    sidecar = {"sigma": lk.sigma, "tv": lk.tv, "integral": lk.integral()}
    with open(args.emit.rsplit(".", 1)[0] + ".json", "w") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _cmd_estimate(args) -> int:
    basis = build_family(args.family)
    density = make_density(args.density, args.dim)
    sample = draw(density, SeedSpec(args.seed), args.n)
    est = fit(basis, args.level, sample)
    box = (np.zeros(args.dim), np.ones(args.dim))
    grid = make_grid(box, args.level, args.grid)
    fhat = np.atleast_1d(evaluate(est, grid.points))
    f = np.atleast_1d(density.pdf(grid.points))
    efhat = [expected_estimator(density, basis, args.level, p)
             for p in grid.points]
    header = ",".join(f"x_{i + 1}" for i in range(args.dim)) + ",fhat,efhat,f"
    _write_csv(args.emit, header,
               ([_fmt(c) for c in p] + [_fmt(a), _fmt(b), _fmt(c2)]
                for p, a, b, c2 in zip(grid.points, fhat, efhat, f)))
    return 0


def _cmd_increments(args) -> int:
    density = make_density(args.density, args.dim)
    sample = draw(density, SeedSpec(args.seed), args.n)
    x = np.asarray([float(v) for v in args.center.split(",")])
    if args.kind == "gnx":
        g = g_n_x(sample, density, x, args.level, grid_step=args.step)
    else:
        g = g_tilde_n_x(sample, density, x, args.level, args.c,
                        grid_step=args.step)
    grids = np.meshgrid(*g.axes, indexing="ij")
    corners = np.stack([gr.ravel() for gr in grids], axis=-1)
    header = ",".join(f"s_{i + 1}" for i in range(args.dim)) + ",value"
    _write_csv(args.emit, header,
               ([_fmt(c) for c in corner] + [_fmt(v)]
                for corner, v in zip(corners, g.values.ravel())))
    return 0


def _cmd_limitsets(args) -> int:
    basis = build_family(args.family)
    pk = ProjectionKernel(basis, args.dim)
    lk = localize(pk, 0, np.zeros(args.dim), args.step)
    iv = gamma_interval(lk, args.v)
    grid_csv = args.emit.rsplit(".", 1)[0] + "_grid.csv"
    corners = cell_lower_corners(lk)
    header = (",".join(f"s_{i + 1}" for i in range(args.dim))
              + ",ktilde,gdot_lo,gdot_hi")
    _write_csv(grid_csv, header,
               ([_fmt(c) for c in corner] + [_fmt(k), _fmt(glo), _fmt(ghi)]
                for corner, k, glo, ghi in zip(
                    corners, lk.cell_values().ravel(),
                    iv.certificate["gdot_lo"].ravel(),
                    iv.certificate["gdot_hi"].ravel())))
    payload = {"v": iv.v, "lo": iv.lo, "hi": iv.hi,
               "eta_lo": iv.certificate["eta_lo"],
               "eta_hi": iv.certificate["eta_hi"],
               "certificate_grid_csv": grid_csv}
    with open(args.emit, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return 0


def _load_config(path: str) -> ExperimentConfig:
    with open(path) as fh:
        data = json.load(fh)
    return ExperimentConfig.from_dict(data)


def _cmd_theorem(args, which: int) -> int:
    config = _load_config(args.config)
    if config.theorem != which:
        raise ConfigurationError(f"config declares theorem {config.theorem}, "
                                 f"subcommand expects {which}")
    report = run_theorem1(config) if which == 1 else run_theorem2(config)
    out = args.output or config.output or f"theorem{which}"
    csv_path, json_path = emit_report(report, out)
    status = "pass" if report["passed"] else "FAIL"
    print(f"theorem{which}: {status}  records={csv_path} summary={json_path}")
    for name, ok in report["predicates"].items():
        print(f"  {name}: {'pass' if ok else 'FAIL'}")
    return 0 if report["passed"] else 1


def _cmd_validate(args) -> int:
    config = _load_config(args.config)
    config.validate()
    print("config ok")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="wavedens",
        description="Wavelet-projection density estimation and its "
                    "fluctuation/consistency experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("basis", help="emit a scaling-function value table")
    b.add_argument("--family", required=True, choices=["haar", "db4", "db6"])
    b.add_argument("--depth", type=int, default=12)
    b.add_argument("--emit", required=True)

    k = sub.add_parser("kernel", help="emit a localized kernel section")
    k.add_argument("--family", required=True, choices=["haar", "db4", "db6"])
    k.add_argument("--dim", type=int, default=1)
    k.add_argument("--level", type=int, default=0)
    k.add_argument("--center", default="0")
    k.add_argument("--step", type=float, default=2.0 ** -10)
    k.add_argument("--emit", required=True)

    e = sub.add_parser("estimate", help="fit and tabulate the estimator")
    e.add_argument("--family", required=True, choices=["haar", "db4", "db6"])
    e.add_argument("--dim", type=int, default=1)
    e.add_argument("--level", type=int, required=True)
    e.add_argument("--density", required=True)
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--grid", choices=["dyadic", "uniform"], default="dyadic")
    e.add_argument("--emit", required=True)

    g = sub.add_parser("increments", help="emit an increment function table")
    g.add_argument("--kind", required=True, choices=["gnx", "gtilde"])
    g.add_argument("--density", required=True)
    g.add_argument("--dim", type=int, default=1)
    g.add_argument("--level", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--center", default="0.5")
    g.add_argument("--c", type=float, default=1.0)
    g.add_argument("--step", type=float, default=2.0 ** -10)
    g.add_argument("--emit", required=True)

    ls = sub.add_parser("limitsets", help="emit a Gamma_v image interval")
    ls.add_argument("--family", required=True, choices=["haar", "db4", "db6"])
    ls.add_argument("--dim", type=int, default=1)
    ls.add_argument("--v", type=float, required=True)
    ls.add_argument("--step", type=float, default=2.0 ** -10)
    ls.add_argument("--emit", required=True)

    for which in (1, 2):
        t = sub.add_parser(f"theorem{which}",
                           help=f"run the theorem-{which} experiment")
        t.add_argument("--config", required=True)
        t.add_argument("--output", default=None)

    v = sub.add_parser("validate", help="check a config file's invariants")
    v.add_argument("--config", required=True)
    return p


_HANDLERS = {
    "basis": _cmd_basis,
    "kernel": _cmd_kernel,
    "estimate": _cmd_estimate,
    "increments": _cmd_increments,
    "limitsets": _cmd_limitsets,
    "theorem1": lambda a: _cmd_theorem(a, 1),
    "theorem2": lambda a: _cmd_theorem(a, 2),
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ConfigurationError, NumericalError, OSError, ValueError,
            KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
