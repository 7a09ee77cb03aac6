"""Command-line figure rendering for solver run directories.

    haptoplots decay       --run-dir out/ref --out decay.png [--fit-window 30,60]
    haptoplots heatmap     --run-dir out/ref --field u [--time 60] --out u.png
    haptoplots convergence --study-dir out/conv --out conv.png

Exit codes: 0 success, 2 usage or artifact error.
"""

from __future__ import annotations

import argparse
import os
import sys

import matplotlib

from .artifacts import (
    ArtifactError,
    nearest_snapshot,
    read_convergence,
    read_functionals,
    read_run_config,
    read_snapshot,
)
from . import figures

EXIT_OK = 0
EXIT_USAGE = 2


def _load_run(run_dir: str):
    table = read_functionals(os.path.join(run_dir, "functionals.csv"))
    config = read_run_config(os.path.join(run_dir, "config.echo"))
    if table.failure is not None:
        print(f"note: run stopped early ({table.failure})", file=sys.stderr)
    return table, config


def _cmd_decay(args) -> int:
    table, config = _load_run(args.run_dir)
    window = None
    if args.fit_window is not None:
        parts = args.fit_window.replace(",", " ").split()
        if len(parts) != 2:
            raise ArtifactError(f"--fit-window: expected two numbers, "
                                f"got {args.fit_window!r}")
        try:
            window = (float(parts[0]), float(parts[1]))
        except ValueError:
            raise ArtifactError(f"--fit-window: expected numbers, "
                                f"got {args.fit_window!r}") from None
    fig, fit = figures.plot_decay(table, config, out_path=args.out,
                                  fit_window=window)
    if fit is None:
        print("decay: no positive w+z mass in the fit window; no fit drawn")
    else:
        print(f"decay: fitted rate {fit.rate:.6f} over "
              f"[{fit.window[0]:g}, {fit.window[1]:g}], "
              f"R^2 {fit.r_squared:.6f}")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_heatmap(args) -> int:
    path = nearest_snapshot(args.run_dir, args.field, args.time)
    meta, values = read_snapshot(path)
    figures.plot_heatmap(meta, values, out_path=args.out)
    print(f"heatmap: {meta.field} at t={meta.t:g} from {os.path.basename(path)}, "
          f"range [{values.min():.6g}, {values.max():.6g}]")
    print(f"wrote {args.out}")
    return EXIT_OK


def _cmd_convergence(args) -> int:
    study = read_convergence(os.path.join(args.study_dir, "convergence.csv"))
    figures.plot_convergence(study, out_path=args.out)
    order = ("n/a" if study.observed_order is None
             else f"{study.observed_order:.3f}")
    print(f"convergence: observed order {order}")
    print(f"wrote {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="haptoplots",
        description="Render figures from solver run artifacts")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decay", help="semilog infection decay with envelope and fit")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--fit-window", default=None,
                   help="time window for the exponential fit, e.g. 30,60")
    p.set_defaults(fn=_cmd_decay)

    p = sub.add_parser("heatmap", help="heatmap of one field snapshot")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--field", default="u", choices=("u", "v", "w", "z"))
    p.add_argument("--time", type=float, default=None,
                   help="snapshot time (default: the latest available)")
    p.set_defaults(fn=_cmd_heatmap)

    p = sub.add_parser("convergence", help="log-log error plot of a grid study")
    p.add_argument("--study-dir", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=_cmd_convergence)
    return parser


def main(argv=None) -> int:
    matplotlib.use("Agg")
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ArtifactError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
