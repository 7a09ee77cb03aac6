"""Serialization, config files, and the command-line interface.

File formats
------------
functionals.csv   header ``t,mass_u,...`` (the exact FunctionalRecord column
                  order), one row per record, floats written with repr so the
                  file parses back losslessly. A failed run appends a final
                  comment line ``# run failed: <reason>``.
snapshots/        one plain-text matrix per field per snapshot time, named
                  ``<field>_t<time>.txt``: a header ``# nx ny hx hy t field``
                  followed by ny rows of nx repr floats.
checks.txt        one line per assertion (status, name, value, comparison,
                  bound) grouped by suite, then an ``overall:`` line.
config.echo       the fully resolved scenario in the input INI format; the
                  echo of a parsed config parses back to an equal config.
sweep.csv         columns: param, value, status, beta_lt_1, stop_reason,
                  final_t, wz_decay_rate, final_wz_mass, final_l2_u_minus_1,
                  final_linf_v, final_linf_w, final_linf_z, final_min_u,
                  final_lyapunov, sup_linf_total, error. One row per value;
                  each value's run artifacts land in ``<param>=<value>/``.
convergence.csv   a comment line with the fitted order, then columns
                  nx, ny, hx, err_l2_u.
oracle.csv        columns t, u, v, w, z of the RK4 reference trajectory.

All writers are atomic (temp file in the target directory, then rename), so
readers never observe a half-written file.

Config files are flat INI with sections [params], [grid], [controls],
[initial], [outputs]; unknown sections or keys are errors, and every key has
a documented default (the reference scenario). The [initial] section is
keyed by ``kind``; each kind accepts only its own keys (see KIND_KEYS).

Exit codes: 0 success, 1 check failure, 2 usage or config error,
3 numerical failure.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import os
import sys
import tempfile

import numpy as np

from . import backend as _backend
from .diagnostics import CSV_COLUMNS, FunctionalRecord, run_suite
from .errors import ConfigError, NumericalError, SimulationError
from .harness import (
    RECIPE_KINDS,
    BumpSpec,
    InitialRecipe,
    OutputPlan,
    ScenarioConfig,
    converge,
    ode_oracle,
    sweep,
)
from .model import Grid, Parameters
from .timestepper import RunResult, StepControls, run

# --- atomic writing ---------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    """Write text to path via a temp file + rename in the same directory."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp_", suffix="~")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# --- functionals ------------------------------------------------------------


def write_functionals(path: str, records, failure: str | None = None) -> None:
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(",".join(repr(x) for x in r.as_row()) for r in records)
    if failure is not None:
        lines.append(f"# run failed: {failure}")
    _atomic_write(path, "\n".join(lines) + "\n")


def read_functionals(path: str):
    """Parse functionals.csv; returns (records, failure message or None)."""
    records = []
    failure = None
    with open(path) as handle:
        header = handle.readline().rstrip("\n")
        if header.split(",") != list(CSV_COLUMNS):
            raise ConfigError(f"{path}: unexpected functionals header {header!r}")
        for lineno, line in enumerate(handle, start=2):
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                if "run failed:" in line:
                    failure = line.split("run failed:", 1)[1].strip()
                continue
            parts = line.split(",")
            if len(parts) != len(CSV_COLUMNS):
                raise ConfigError(f"{path}:{lineno}: expected {len(CSV_COLUMNS)} "
                                  f"columns, got {len(parts)}")
            try:
                values = [float(p) for p in parts]
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from exc
            records.append(FunctionalRecord(*values))
    return records, failure


# --- snapshots ---------------------------------------------------------------


def snapshot_filename(field: str, t: float) -> str:
    return f"{field}_t{t:.6f}.txt"


def write_snapshot(path: str, field: str, values: np.ndarray, grid: Grid,
                   t: float) -> None:
    lines = [f"# {grid.nx} {grid.ny} {grid.hx!r} {grid.hy!r} {float(t)!r} {field}"]
    lines.extend(" ".join(repr(float(x)) for x in row) for row in values)
    _atomic_write(path, "\n".join(lines) + "\n")


def read_snapshot(path: str):
    """Parse one snapshot file; returns (meta dict, (ny, nx) array)."""
    with open(path) as handle:
        header = handle.readline().rstrip("\n")
        if not header.startswith("# "):
            raise ConfigError(f"{path}: missing snapshot header")
        parts = header[2:].split()
        if len(parts) != 6:
            raise ConfigError(f"{path}: malformed snapshot header {header!r}")
        meta = {
            "nx": int(parts[0]),
            "ny": int(parts[1]),
            "hx": float(parts[2]),
            "hy": float(parts[3]),
            "t": float(parts[4]),
            "field": parts[5],
        }
        values = np.loadtxt(handle, dtype=np.float64, ndmin=2)
    if values.shape != (meta["ny"], meta["nx"]):
        raise ConfigError(f"{path}: expected {(meta['ny'], meta['nx'])} values, "
                          f"got {values.shape}")
    return meta, values


# --- check reports -----------------------------------------------------------


def write_checks(path: str, reports) -> None:
    blocks = [report.format() for report in reports]
    overall = "pass" if all(report.passed for report in reports) else "fail"
    _atomic_write(path, "\n".join(blocks) + f"\noverall: {overall}\n")


# --- config files ------------------------------------------------------------

SECTIONS = ("params", "grid", "controls", "initial", "outputs")

KIND_KEYS = {
    "equilibrium": set(),
    "homogeneous": {"u0", "v0", "w0", "z0"},
    "gaussian-bumps": {f"{f}_{k}" for f in "uvwz"
                       for k in ("base", "amp", "cx", "cy", "sigma")},
    "perturbed-homogeneous": {"u0", "v0", "w0", "z0", "noise_amp"},
}

PARAM_KEYS = ("mu", "beta", "d_w", "d_z")
GRID_KEYS = ("nx", "ny", "lx", "ly")
CONTROL_KEYS = ("dt_init", "dt_min", "safety", "t_end", "cfl_diff",
                "positivity_guard", "max_steps_per_segment")
OUTPUT_KEYS = ("cadence", "snapshot_times", "p", "delta_floor", "out_dir")


class _Section:
    """Typed access to one INI section with unknown-key detection."""

    def __init__(self, name: str, raw: dict):
        self.name = name
        self.raw = dict(raw)

    def check_keys(self, allowed) -> None:
        unknown = sorted(set(self.raw) - set(allowed))
        if unknown:
            raise ConfigError(f"[{self.name}]: unknown key(s) {unknown}; "
                              f"valid keys: {sorted(allowed)}")

    def get_float(self, key: str, default: float) -> float:
        if key not in self.raw:
            return default
        try:
            return float(self.raw[key])
        except ValueError:
            raise ConfigError(f"[{self.name}] {key}: expected a number, "
                              f"got {self.raw[key]!r}") from None

    def get_int(self, key: str, default: int) -> int:
        if key not in self.raw:
            return default
        try:
            return int(self.raw[key], 10)
        except ValueError:
            raise ConfigError(f"[{self.name}] {key}: expected an integer, "
                              f"got {self.raw[key]!r}") from None

    def get_str(self, key: str, default: str) -> str:
        return self.raw.get(key, default)

    def get_float_list(self, key: str, default: tuple) -> tuple:
        if key not in self.raw:
            return default
        text = self.raw[key].strip()
        if not text:
            return ()
        try:
            return tuple(float(p) for p in text.replace(",", " ").split())
        except ValueError:
            raise ConfigError(f"[{self.name}] {key}: expected numbers, "
                              f"got {self.raw[key]!r}") from None


def parse_config(path: str) -> ScenarioConfig:
    """Parse and validate a scenario config file.

    Missing keys take the documented defaults (the reference scenario);
    unknown sections or keys, malformed lines, and out-of-range values are
    ConfigErrors naming the offender.
    """
    cp = configparser.ConfigParser(interpolation=None,
                                   inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as handle:
            cp.read_file(handle, source=str(path))
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc

    unknown = sorted(set(cp.sections()) - set(SECTIONS))
    if unknown:
        raise ConfigError(f"unknown section(s) {unknown}; valid sections: "
                          f"{list(SECTIONS)}")

    def section(name: str) -> _Section:
        return _Section(name, cp[name] if cp.has_section(name) else {})

    defaults = InitialRecipe()
    try:
        sec = section("params")
        sec.check_keys(PARAM_KEYS)
        params = Parameters(
            mu=sec.get_float("mu", 1.0),
            beta=sec.get_float("beta", 0.5),
            d_w=sec.get_float("d_w", 1.0),
            d_z=sec.get_float("d_z", 1.0),
        )

        sec = section("grid")
        sec.check_keys(GRID_KEYS)
        grid = Grid(
            nx=sec.get_int("nx", 64),
            ny=sec.get_int("ny", 64),
            lx=sec.get_float("lx", 1.0),
            ly=sec.get_float("ly", 1.0),
        )

        sec = section("controls")
        sec.check_keys(CONTROL_KEYS)
        controls = StepControls(
            dt_init=sec.get_float("dt_init", 1e-3),
            dt_min=sec.get_float("dt_min", 1e-12),
            safety=sec.get_float("safety", 0.9),
            t_end=sec.get_float("t_end", 60.0),
            cfl_diff=sec.get_float("cfl_diff", 0.25),
            positivity_guard=sec.get_float("positivity_guard", 0.9),
            max_steps_per_segment=sec.get_int("max_steps_per_segment", 10_000_000),
        )

        sec = section("initial")
        kind = sec.get_str("kind", defaults.kind)
        if kind not in RECIPE_KINDS:
            raise ConfigError(f"[initial] kind: must be one of {RECIPE_KINDS}, "
                              f"got {kind!r}")
        sec.check_keys({"kind", "seed"} | KIND_KEYS[kind])
        seed = sec.get_int("seed", 0)
        if kind == "equilibrium":
            initial = InitialRecipe(kind=kind)
        elif kind in ("homogeneous", "perturbed-homogeneous"):
            initial = InitialRecipe(
                kind=kind,
                u0=sec.get_float("u0", defaults.u0),
                v0=sec.get_float("v0", defaults.v0),
                w0=sec.get_float("w0", defaults.w0),
                z0=sec.get_float("z0", defaults.z0),
                noise_amp=sec.get_float("noise_amp", defaults.noise_amp),
            )
        else:
            bumps = {}
            for f in "uvwz":
                ref: BumpSpec = getattr(defaults, f"{f}_bump")
                bumps[f"{f}_bump"] = BumpSpec(
                    base=sec.get_float(f"{f}_base", ref.base),
                    amp=sec.get_float(f"{f}_amp", ref.amp),
                    cx=sec.get_float(f"{f}_cx", ref.cx),
                    cy=sec.get_float(f"{f}_cy", ref.cy),
                    sigma=sec.get_float(f"{f}_sigma", ref.sigma),
                )
            initial = InitialRecipe(kind=kind, **bumps)

        sec = section("outputs")
        sec.check_keys(OUTPUT_KEYS)
        out_dir = sec.get_str("out_dir", "")
        outputs = OutputPlan(
            cadence=sec.get_float("cadence", 0.1),
            snapshot_times=sec.get_float_list("snapshot_times", ()),
            p=sec.get_float("p", 3.0),
            delta_floor=sec.get_float("delta_floor", 0.01),
            out_dir=out_dir or None,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    return ScenarioConfig(params=params, grid=grid, controls=controls,
                          initial=initial, outputs=outputs, seed=seed)


def write_config_echo(path: str, config: ScenarioConfig) -> None:
    """Write the fully resolved config; parsing it back gives an equal config."""
    cp = configparser.ConfigParser(interpolation=None)
    p, g, c, r, o = (config.params, config.grid, config.controls,
                     config.initial, config.outputs)
    cp["params"] = {k: repr(getattr(p, k)) for k in PARAM_KEYS}
    cp["grid"] = {"nx": str(g.nx), "ny": str(g.ny), "lx": repr(g.lx), "ly": repr(g.ly)}
    cp["controls"] = {
        "dt_init": repr(c.dt_init), "dt_min": repr(c.dt_min),
        "safety": repr(c.safety), "t_end": repr(c.t_end),
        "cfl_diff": repr(c.cfl_diff), "positivity_guard": repr(c.positivity_guard),
        "max_steps_per_segment": str(c.max_steps_per_segment),
    }
    init: dict[str, str] = {"kind": r.kind, "seed": str(config.seed)}
    if r.kind in ("homogeneous", "perturbed-homogeneous"):
        init.update({k: repr(getattr(r, k)) for k in ("u0", "v0", "w0", "z0")})
        if r.kind == "perturbed-homogeneous":
            init["noise_amp"] = repr(r.noise_amp)
    elif r.kind == "gaussian-bumps":
        for f in "uvwz":
            bump: BumpSpec = getattr(r, f"{f}_bump")
            init.update({
                f"{f}_base": repr(bump.base), f"{f}_amp": repr(bump.amp),
                f"{f}_cx": repr(bump.cx), f"{f}_cy": repr(bump.cy),
                f"{f}_sigma": repr(bump.sigma),
            })
    cp["initial"] = init
    out: dict[str, str] = {
        "cadence": repr(o.cadence),
        "snapshot_times": ", ".join(repr(t) for t in o.snapshot_times),
        "p": repr(o.p),
        "delta_floor": repr(o.delta_floor),
    }
    if o.out_dir:
        out["out_dir"] = o.out_dir
    cp["outputs"] = out
    buf = io.StringIO()
    cp.write(buf)
    _atomic_write(path, buf.getvalue())


# --- study reports ------------------------------------------------------------

SWEEP_COLUMNS = ("param", "value", "status", "beta_lt_1", "stop_reason",
                 "final_t", "wz_decay_rate", "final_wz_mass",
                 "final_l2_u_minus_1", "final_linf_v", "final_linf_w",
                 "final_linf_z", "final_min_u", "final_lyapunov",
                 "sup_linf_total", "error")


def write_sweep_csv(path: str, report) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(SWEEP_COLUMNS)
    for row in report.rows:
        rate = "" if row.wz_decay_rate is None else repr(row.wz_decay_rate)
        writer.writerow([
            row.param, repr(row.value), row.status, str(row.beta_lt_1).lower(),
            row.stop_reason, repr(row.final_t), rate, repr(row.final_wz_mass),
            repr(row.final_l2_u_minus_1), repr(row.final_linf_v),
            repr(row.final_linf_w), repr(row.final_linf_z),
            repr(row.final_min_u), repr(row.final_lyapunov),
            repr(row.sup_linf_total), row.error,
        ])
    _atomic_write(path, buf.getvalue())


def write_convergence_csv(path: str, report) -> None:
    order = "nan" if report.observed_order is None else repr(report.observed_order)
    lines = [
        f"# observed_order={order} t_horizon={report.t_horizon!r} "
        f"dt={report.dt!r} note={report.note}",
        "nx,ny,hx,err_l2_u",
    ]
    lines.extend(f"{r.nx},{r.ny},{r.hx!r},{r.err_l2_u!r}" for r in report.rows)
    _atomic_write(path, "\n".join(lines) + "\n")


def write_oracle_csv(path: str, trajectory) -> None:
    lines = ["t,u,v,w,z"]
    lines.extend(
        ",".join(repr(float(x)) for x in (trajectory.t[k], *trajectory.y[k]))
        for k in range(trajectory.t.size)
    )
    _atomic_write(path, "\n".join(lines) + "\n")


# --- run output bundles --------------------------------------------------------


def write_run_outputs(out_dir: str, config: ScenarioConfig, result: RunResult,
                      failure: str | None = None) -> None:
    """config.echo, functionals.csv, and snapshots for one (possibly failed) run."""
    os.makedirs(out_dir, exist_ok=True)
    write_config_echo(os.path.join(out_dir, "config.echo"), config)
    write_functionals(os.path.join(out_dir, "functionals.csv"),
                      result.records, failure=failure)
    if result.snapshots:
        snap_dir = os.path.join(out_dir, "snapshots")
        for t, fields in sorted(result.snapshots.items()):
            for name, values in fields.items():
                write_snapshot(os.path.join(snap_dir, snapshot_filename(name, t)),
                               name, values, config.grid, t)


# --- CLI -----------------------------------------------------------------------

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3


def _load_config(path: str, out_dir: str | None) -> ScenarioConfig:
    config = parse_config(path)
    if out_dir is not None:
        from dataclasses import replace
        config = replace(config, outputs=replace(config.outputs, out_dir=out_dir))
    if config.outputs.out_dir is None:
        raise ConfigError("no output directory: pass --out or set "
                          "[outputs] out_dir in the config")
    return config


def _run_with_outputs(config: ScenarioConfig) -> RunResult:
    """Run and persist artifacts; on numerical failure persist the partial
    output with a failure marker and re-raise."""
    out_dir = config.outputs.out_dir
    try:
        result = run(config)
    except NumericalError as exc:
        if exc.result is not None:
            write_run_outputs(out_dir, config, exc.result,
                              failure=exc.result.stop_reason)
        raise
    write_run_outputs(out_dir, config, result)
    return result


def _cmd_run(args) -> int:
    config = _load_config(args.config, args.out)
    result = _run_with_outputs(config)
    print(f"run: t={result.final_state.t:g} steps={result.telemetry.steps} "
          f"rejects={result.telemetry.rejects} stop={result.stop_reason}")
    print(f"wrote {config.outputs.out_dir}/functionals.csv "
          f"({len(result.records)} records)")
    return EXIT_OK


def _cmd_check(args) -> int:
    config = _load_config(args.config, args.out)
    result = _run_with_outputs(config)
    reports = run_suite(result, config, args.suite)
    path = os.path.join(config.outputs.out_dir, "checks.txt")
    write_checks(path, reports)
    ok = all(report.passed for report in reports)
    for report in reports:
        print(report.format())
    print(f"overall: {'pass' if ok else 'fail'}")
    print(f"wrote {path}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _cmd_sweep(args) -> int:
    config = _load_config(args.config, args.out)
    try:
        values = [float(v) for v in args.values.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"--values: expected numbers, got {args.values!r}") from None
    if not values:
        raise ConfigError("--values: at least one value required")
    out_dir = config.outputs.out_dir
    from dataclasses import replace
    base = replace(config, outputs=replace(config.outputs, out_dir=None))

    def persist(value, cfg_row, result):
        # each value's own artifacts, so sweeps compose by subdirectory
        sub = os.path.join(out_dir, f"{args.param}={value:g}")
        cfg_out = replace(cfg_row, outputs=replace(cfg_row.outputs, out_dir=sub))
        write_run_outputs(sub, cfg_out, result)

    report = sweep(base, args.param, values, on_result=persist)
    write_sweep_csv(os.path.join(out_dir, "sweep.csv"), report)
    for row in report.rows:
        note = row.error if row.status != "ok" else f"final_t={row.final_t:g}"
        print(f"sweep {row.param}={row.value:g}: {row.status} "
              f"beta_lt_1={str(row.beta_lt_1).lower()} {note}")
    print(f"wrote {out_dir}/sweep.csv")
    return EXIT_OK


def _cmd_converge(args) -> int:
    config = _load_config(args.config, args.out)
    try:
        grids = [int(v) for v in args.grids.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"--grids: expected integers, got {args.grids!r}") from None
    try:
        report = converge(config, grids, t_horizon=args.t_horizon)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out_dir = config.outputs.out_dir
    os.makedirs(out_dir, exist_ok=True)
    write_config_echo(os.path.join(out_dir, "config.echo"), config)
    path = os.path.join(out_dir, "convergence.csv")
    write_convergence_csv(path, report)
    for row in report.rows:
        print(f"converge nx={row.nx}: err_l2_u={row.err_l2_u:.6e}")
    order = ("n/a" if report.observed_order is None
             else f"{report.observed_order:.3f}")
    print(f"observed order: {order} {report.note}")
    print(f"wrote {path}")
    return EXIT_OK


def _cmd_oracle(args) -> int:
    config = _load_config(args.config, args.out)
    recipe = config.initial
    if recipe.kind != "homogeneous":
        raise ConfigError("oracle: the scenario must use the homogeneous "
                          f"initial recipe (got kind={recipe.kind!r})")
    trajectory = ode_oracle((recipe.u0, recipe.v0, recipe.w0, recipe.z0),
                            config.params, config.controls.t_end,
                            dt_ref=args.dt_ref,
                            sample_dt=config.outputs.cadence)
    out_dir = config.outputs.out_dir
    os.makedirs(out_dir, exist_ok=True)
    write_config_echo(os.path.join(out_dir, "config.echo"), config)
    path = os.path.join(out_dir, "oracle.csv")
    write_oracle_csv(path, trajectory)
    u, v, w, z = trajectory.final
    print(f"oracle: t={trajectory.t[-1]:g} u={u:.9g} v={v:.9g} w={w:.9g} z={z:.9g}")
    print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="haptosim",
        description="Finite-difference simulator for the four-field "
                    "haptotaxis virotherapy model",
    )
    parser.add_argument("--backend", choices=("compiled", "fallback"),
                        default=None,
                        help="force a stepping backend (default: compiled "
                             "when built; HAPTOSIM_BACKEND overrides)")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="scenario config file")
        p.add_argument("--out", default=None, help="output directory")

    p = sub.add_parser("run", help="integrate a scenario and write artifacts")
    common(p)
    p.set_defaults(fn=_cmd_run)

    p = sub.add_parser("check", help="run a scenario and evaluate a check suite")
    common(p)
    p.add_argument("--suite", default="all",
                   choices=("all", "boundedness", "decay", "stabilization",
                            "lyapunov"))
    p.set_defaults(fn=_cmd_check)

    p = sub.add_parser("sweep", help="rerun a scenario over parameter values")
    common(p)
    p.add_argument("--param", required=True, choices=("mu", "beta", "d_w", "d_z"))
    p.add_argument("--values", required=True,
                   help="comma-separated list, e.g. 0.25,0.5,0.9")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("converge", help="grid self-convergence study")
    common(p)
    p.add_argument("--grids", required=True,
                   help="comma-separated nx values, coarse to fine, e.g. 32,64,128")
    p.add_argument("--t-horizon", type=float, default=1.0, dest="t_horizon")
    p.set_defaults(fn=_cmd_converge)

    p = sub.add_parser("oracle", help="RK4 reference for a homogeneous scenario")
    common(p)
    p.add_argument("--dt-ref", type=float, default=1e-5, dest="dt_ref")
    p.set_defaults(fn=_cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.backend is not None:
        os.environ["HAPTOSIM_BACKEND"] = args.backend
    try:
        _backend.resolve(args.backend)
    except ImportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SimulationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
