"""Scenario assembly: initial recipes, presets, the ODE oracle, and studies.

A ScenarioConfig bundles everything a run needs. Initial recipes:

  equilibrium             u=1, v=w=z=0 (the scheme must hold it exactly)
  homogeneous             constant fields (u0, v0, w0, z0)
  gaussian-bumps          per-field base + amp * exp(-r^2 / (2 sigma^2))
  perturbed-homogeneous   constant base plus one-sided uniform noise
                          amp * U(0,1), seeded; one-sided so nonnegativity
                          survives without clipping

The ODE oracle integrates the spatially homogeneous reduction with classical
fixed-step RK4 and is the independent reference for the PDE path on constant
data (where the spatial operators vanish identically).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import SimulationError
from .model import Grid, Parameters, State
from .timestepper import StepControls, run, run_fixed_dt, stable_dt

RECIPE_KINDS = ("equilibrium", "homogeneous", "gaussian-bumps", "perturbed-homogeneous")


def _require(cond: bool, key: str, constraint: str, value) -> None:
    if not cond:
        raise ValueError(f"{key}: must be {constraint} (got {value!r})")


@dataclass(frozen=True)
class BumpSpec:
    """One radial Gaussian: base + amp * exp(-((x-cx)^2+(y-cy)^2)/(2 sigma^2))."""

    base: float
    amp: float
    cx: float
    cy: float
    sigma: float

    def __post_init__(self):
        _require(math.isfinite(self.base), "base", "finite", self.base)
        _require(math.isfinite(self.amp), "amp", "finite", self.amp)
        _require(math.isfinite(self.sigma) and self.sigma > 0.0, "sigma", "finite and > 0", self.sigma)

    def evaluate(self, xx: np.ndarray, yy: np.ndarray) -> np.ndarray:
        r2 = (xx - self.cx) ** 2 + (yy - self.cy) ** 2
        return self.base + self.amp * np.exp(-r2 / (2.0 * self.sigma ** 2))


# The frozen default scenario initial data: a tumor-density bump and matrix
# bump at the center, infected cells and virions seeded off-center.
DEFAULT_BUMPS = {
    "u": BumpSpec(1.0, 0.1, 0.5, 0.5, 0.12),
    "v": BumpSpec(0.0, 0.5, 0.5, 0.5, 0.15),
    "w": BumpSpec(0.0, 0.05, 0.35, 0.35, 0.1),
    "z": BumpSpec(0.0, 0.05, 0.65, 0.65, 0.1),
}


@dataclass(frozen=True)
class InitialRecipe:
    """How to build the t=0 state; which fields matter depends on kind."""

    kind: str = "gaussian-bumps"
    u0: float = 1.0
    v0: float = 0.0
    w0: float = 0.0
    z0: float = 0.0
    noise_amp: float = 0.05
    u_bump: BumpSpec = DEFAULT_BUMPS["u"]
    v_bump: BumpSpec = DEFAULT_BUMPS["v"]
    w_bump: BumpSpec = DEFAULT_BUMPS["w"]
    z_bump: BumpSpec = DEFAULT_BUMPS["z"]

    def __post_init__(self):
        _require(self.kind in RECIPE_KINDS, "kind", f"one of {RECIPE_KINDS}", self.kind)
        _require(math.isfinite(self.noise_amp) and self.noise_amp >= 0.0,
                 "noise_amp", "finite and >= 0", self.noise_amp)
        for key in ("u0", "v0", "w0", "z0"):
            _require(math.isfinite(getattr(self, key)), key, "finite", getattr(self, key))


def build_initial_state(recipe: InitialRecipe, grid: Grid, seed: int = 0) -> State:
    """Materialize a recipe on a grid. Deterministic given (recipe, grid, seed)."""
    shape = grid.shape
    if recipe.kind == "equilibrium":
        return State(0.0, np.ones(shape), np.zeros(shape), np.zeros(shape), np.zeros(shape))

    if recipe.kind == "homogeneous":
        _require(recipe.u0 > 0.0, "u0", "> 0", recipe.u0)
        for key in ("v0", "w0", "z0"):
            _require(getattr(recipe, key) >= 0.0, key, ">= 0", getattr(recipe, key))
        return State(0.0, np.full(shape, recipe.u0), np.full(shape, recipe.v0),
                     np.full(shape, recipe.w0), np.full(shape, recipe.z0))

    if recipe.kind == "gaussian-bumps":
        x, y = grid.cell_centers()
        xx, yy = np.meshgrid(x, y)
        u = recipe.u_bump.evaluate(xx, yy)
        v = recipe.v_bump.evaluate(xx, yy)
        w = recipe.w_bump.evaluate(xx, yy)
        z = recipe.z_bump.evaluate(xx, yy)
        _require(float(u.min()) > 0.0, "u_bump", "positive everywhere", float(u.min()))
        for key, arr in (("v_bump", v), ("w_bump", w), ("z_bump", z)):
            _require(float(arr.min()) >= 0.0, key, "nonnegative everywhere", float(arr.min()))
        return State(0.0, u, v, w, z)

    # perturbed-homogeneous
    _require(recipe.u0 > 0.0, "u0", "> 0", recipe.u0)
    for key in ("v0", "w0", "z0"):
        _require(getattr(recipe, key) >= 0.0, key, ">= 0", getattr(recipe, key))
    rng = np.random.default_rng(seed)
    fields = [base + recipe.noise_amp * rng.random(shape)
              for base in (recipe.u0, recipe.v0, recipe.w0, recipe.z0)]
    return State(0.0, *fields)


@dataclass(frozen=True)
class OutputPlan:
    """Record cadence, snapshot times, output norms, and the u floor."""

    cadence: float = 0.1
    snapshot_times: tuple[float, ...] = ()
    p: float = 3.0
    delta_floor: float = 0.01
    out_dir: str | None = None

    def __post_init__(self):
        _require(math.isfinite(self.cadence) and self.cadence > 0.0,
                 "cadence", "finite and > 0", self.cadence)
        _require(math.isfinite(self.p) and self.p >= 1.0, "p", "finite and >= 1", self.p)
        _require(math.isfinite(self.delta_floor) and self.delta_floor > 0.0,
                 "delta_floor", "finite and > 0", self.delta_floor)
        for ts in self.snapshot_times:
            _require(math.isfinite(ts) and ts >= 0.0, "snapshot_times",
                     "finite and >= 0", ts)


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything one run needs; equal configs produce identical outputs."""

    params: Parameters
    grid: Grid
    controls: StepControls
    initial: InitialRecipe
    outputs: OutputPlan
    seed: int = 0


def reference_scenario() -> ScenarioConfig:
    """The default scenario: unit square, 64x64, mu=1, beta=0.5, t_end=60,
    Gaussian-bump initial data, snapshots at t=0 and t=60."""
    return ScenarioConfig(
        params=Parameters(mu=1.0, beta=0.5, d_w=1.0, d_z=1.0),
        grid=Grid(nx=64, ny=64, lx=1.0, ly=1.0),
        controls=StepControls(t_end=60.0),
        initial=InitialRecipe(kind="gaussian-bumps"),
        outputs=OutputPlan(cadence=0.1, snapshot_times=(0.0, 60.0)),
        seed=0,
    )


def equilibrium_preset(t_end: float = 60.0) -> ScenarioConfig:
    """The clear state (1, 0, 0, 0); every record should sit at zero residual."""
    base = reference_scenario()
    return replace(base, initial=InitialRecipe(kind="equilibrium"),
                   controls=replace(base.controls, t_end=t_end),
                   outputs=replace(base.outputs, snapshot_times=()))


def homogeneous_preset(u0: float = 0.5, v0: float = 0.3, w0: float = 0.2,
                       z0: float = 0.1, t_end: float = 10.0,
                       nx: int = 32) -> ScenarioConfig:
    """Constant initial data on a small grid: the ODE-oracle comparison case."""
    base = reference_scenario()
    return replace(
        base,
        grid=Grid(nx=nx, ny=nx, lx=1.0, ly=1.0),
        controls=replace(base.controls, t_end=t_end),
        initial=InitialRecipe(kind="homogeneous", u0=u0, v0=v0, w0=w0, z0=z0),
        outputs=replace(base.outputs, cadence=0.01, snapshot_times=()),
    )


def mu_zero_exploratory() -> ScenarioConfig:
    """No logistic damping: outside every proven guarantee, short horizon.

    Exploratory only; excluded from the acceptance gates.
    """
    base = reference_scenario()
    return replace(base, params=replace(base.params, mu=0.0),
                   controls=replace(base.controls, t_end=5.0),
                   outputs=replace(base.outputs, snapshot_times=(0.0, 5.0)))


def large_reference_preset() -> ScenarioConfig:
    """The default scenario at 256x256: a long reference run, hours of CPU.

    Provided for completeness; nothing in the test suite executes it.
    """
    base = reference_scenario()
    return replace(base, grid=Grid(nx=256, ny=256, lx=1.0, ly=1.0))


# --- ODE oracle -------------------------------------------------------------

_RK4_SEGMENT = None


def _rk4_segment_fn():
    """Build (once) the jitted fixed-step RK4 segment integrator."""
    global _RK4_SEGMENT
    if _RK4_SEGMENT is None:
        import numba

        @numba.njit(cache=True)
        def seg(u, v, w, z, mu, beta, dt, m):
            for _ in range(m):
                k1u = mu * u * (1.0 - u) - u * z
                k1v = -(u + w) * v
                k1w = u * z - w
                k1z = beta * w - z - u * z

                u2 = u + 0.5 * dt * k1u
                v2 = v + 0.5 * dt * k1v
                w2 = w + 0.5 * dt * k1w
                z2 = z + 0.5 * dt * k1z
                k2u = mu * u2 * (1.0 - u2) - u2 * z2
                k2v = -(u2 + w2) * v2
                k2w = u2 * z2 - w2
                k2z = beta * w2 - z2 - u2 * z2

                u3 = u + 0.5 * dt * k2u
                v3 = v + 0.5 * dt * k2v
                w3 = w + 0.5 * dt * k2w
                z3 = z + 0.5 * dt * k2z
                k3u = mu * u3 * (1.0 - u3) - u3 * z3
                k3v = -(u3 + w3) * v3
                k3w = u3 * z3 - w3
                k3z = beta * w3 - z3 - u3 * z3

                u4 = u + dt * k3u
                v4 = v + dt * k3v
                w4 = w + dt * k3w
                z4 = z + dt * k3z
                k4u = mu * u4 * (1.0 - u4) - u4 * z4
                k4v = -(u4 + w4) * v4
                k4w = u4 * z4 - w4
                k4z = beta * w4 - z4 - u4 * z4

                u = u + (dt / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u)
                v = v + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
                w = w + (dt / 6.0) * (k1w + 2.0 * k2w + 2.0 * k3w + k4w)
                z = z + (dt / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
            return u, v, w, z

        _RK4_SEGMENT = seg
    return _RK4_SEGMENT


@dataclass
class OracleTrajectory:
    """Sampled reference solution of the homogeneous reduction."""

    t: np.ndarray
    y: np.ndarray  # shape (len(t), 4): columns u, v, w, z

    @property
    def final(self) -> np.ndarray:
        return self.y[-1]


def ode_oracle(y0, params: Parameters, t_end: float, dt_ref: float = 1e-5,
               sample_dt: float = 0.01) -> OracleTrajectory:
    """Classical RK4 on the homogeneous system, sampled every sample_dt.

    dt_ref above 1e-3 is rejected: the reference must stay far more accurate
    than anything it is compared against. The step count is rounded so the
    trajectory lands exactly on t_end.
    """
    u0, v0, w0, z0 = (float(c) for c in y0)
    _require(math.isfinite(t_end) and t_end > 0.0, "t_end", "finite and > 0", t_end)
    _require(math.isfinite(dt_ref) and 0.0 < dt_ref <= 1e-3,
             "dt_ref", "in (0, 1e-3]", dt_ref)
    _require(u0 > 0.0, "y0[0] (u)", "> 0", u0)
    for name, val in (("y0[1] (v)", v0), ("y0[2] (w)", w0), ("y0[3] (z)", z0)):
        _require(val >= 0.0, name, ">= 0", val)

    n = max(1, int(round(t_end / dt_ref)))
    dt = t_end / n
    stride = max(1, int(round(sample_dt / dt)))
    seg = _rk4_segment_fn()

    ks = list(range(0, n + 1, stride))
    if ks[-1] != n:
        ks.append(n)
    t_out = np.array([dt * k for k in ks], dtype=np.float64)
    y_out = np.empty((len(ks), 4), dtype=np.float64)
    y_out[0] = (u0, v0, w0, z0)
    u, v, w, z = u0, v0, w0, z0
    for row in range(1, len(ks)):
        u, v, w, z = seg(u, v, w, z, params.mu, params.beta, dt, ks[row] - ks[row - 1])
        y_out[row] = (u, v, w, z)
    return OracleTrajectory(t_out, y_out)


# --- parameter sweeps -------------------------------------------------------

SWEEPABLE = ("mu", "beta", "d_w", "d_z")


@dataclass
class SweepRow:
    """Outcome of one run of a sweep; failures are recorded, not raised."""

    param: str
    value: float
    status: str  # "ok" or "failed"
    beta_lt_1: bool
    stop_reason: str = ""
    final_t: float = math.nan
    wz_decay_rate: float | None = None
    final_wz_mass: float = math.nan
    final_l2_u_minus_1: float = math.nan
    final_linf_v: float = math.nan
    final_linf_w: float = math.nan
    final_linf_z: float = math.nan
    final_min_u: float = math.nan
    final_lyapunov: float = math.nan
    sup_linf_total: float = math.nan
    error: str = ""


@dataclass
class SweepReport:
    param: str
    rows: list[SweepRow]


def sweep(config: ScenarioConfig, param: str, values, on_result=None) -> SweepReport:
    """Rerun the scenario for each value of one model parameter.

    Rows for beta < 1 are annotated (the decay guarantees apply only there).
    A failing run produces a failed row with the error message; remaining
    values still run. on_result(value, config, result) is called after each
    successful run, letting callers persist per-value artifacts without
    repeating the integration.
    """
    if param not in SWEEPABLE:
        raise ValueError(f"param: must be one of {SWEEPABLE} (got {param!r})")
    from .diagnostics import record_series, fit_decay_rate

    rows = []
    for value in values:
        value = float(value)
        try:
            cfg = replace(config, params=replace(config.params, **{param: value}))
        except ValueError as exc:
            rows.append(SweepRow(param, value, "failed",
                                 beta_lt_1=(value < 1.0 if param == "beta"
                                            else config.params.beta < 1.0),
                                 error=str(exc)))
            continue
        beta_lt_1 = cfg.params.beta < 1.0
        try:
            result = run(cfg)
        except (SimulationError, ValueError) as exc:
            rows.append(SweepRow(param, value, "failed", beta_lt_1, error=str(exc)))
            continue
        if on_result is not None:
            on_result(value, cfg, result)
        records = result.records
        t, wz = record_series(records, "wz_mass")
        try:
            mid = t[0] + 0.5 * (t[-1] - t[0])
            rate = fit_decay_rate(t, wz, (mid, t[-1]))
        except ValueError:
            rate = None
        totals = sum(record_series(records, f"linf_{f}")[1] for f in "uvwz")
        last = records[-1]
        rows.append(SweepRow(
            param, value, "ok", beta_lt_1,
            stop_reason=result.stop_reason,
            final_t=last.t,
            wz_decay_rate=rate,
            final_wz_mass=last.wz_mass,
            final_l2_u_minus_1=last.l2_u_minus_1,
            final_linf_v=last.linf_v,
            final_linf_w=last.linf_w,
            final_linf_z=last.linf_z,
            final_min_u=last.min_u,
            final_lyapunov=last.lyapunov,
            sup_linf_total=float(totals.max()),
        ))
    return SweepReport(param, rows)


# --- grid convergence -------------------------------------------------------

@dataclass
class ConvergenceRow:
    nx: int
    ny: int
    hx: float
    err_l2_u: float


@dataclass
class ConvergenceReport:
    """Self-convergence against the finest grid; order from a log-log fit."""

    rows: list[ConvergenceRow]
    observed_order: float | None
    t_horizon: float
    dt: float
    note: str = ""


def _restrict(fine: np.ndarray, ny_c: int, nx_c: int) -> np.ndarray:
    """Cell-average restriction onto a coarser nested grid."""
    fy = fine.shape[0] // ny_c
    fx = fine.shape[1] // nx_c
    return fine.reshape(ny_c, fy, nx_c, fx).mean(axis=(1, 3))


def converge(config: ScenarioConfig, grids, t_horizon: float = 1.0) -> ConvergenceReport:
    """Run the scenario on nested grids with one shared dt and compare u.

    grids lists nx values, coarse to fine, at least three, each dividing the
    finest; ny scales proportionally. dt is slaved to the finest grid's
    stability bound at t=0 and held fixed, so the measured error is spatial.
    The error on each coarser grid is the L2 distance between its u at
    t_horizon and the cell-average restriction of the finest u. Self-
    convergence is meaningful for smooth (non-random) recipes.
    """
    grids = [int(g) for g in grids]
    if len(grids) < 3:
        raise ValueError(f"grids: need at least 3 resolutions (got {grids!r})")
    if sorted(set(grids)) != grids:
        raise ValueError(f"grids: must be strictly increasing (got {grids!r})")
    finest = grids[-1]
    for g in grids[:-1]:
        if finest % g != 0:
            raise ValueError(f"grids: {g} does not nest in the finest grid {finest}")
    base = config.grid
    if (finest * base.ny) % base.nx != 0:
        raise ValueError(f"grids: ny cannot scale proportionally from "
                         f"{base.nx}x{base.ny} to nx={finest}")
    _require(math.isfinite(t_horizon) and t_horizon > 0.0,
             "t_horizon", "finite and > 0", t_horizon)

    def grid_for(g: int) -> Grid:
        ny = (g * base.ny) // base.nx
        return Grid(nx=g, ny=ny, lx=base.lx, ly=base.ly)

    fine_grid = grid_for(finest)
    state0 = build_initial_state(config.initial, fine_grid, config.seed)
    dt_bound = stable_dt(state0, config.params, fine_grid, config.controls)
    n_steps = max(1, int(math.ceil(t_horizon / dt_bound)))
    dt = t_horizon / n_steps

    finals: dict[int, np.ndarray] = {}
    for g in grids:
        grd = grid_for(g)
        st = build_initial_state(config.initial, grd, config.seed)
        st, _ = run_fixed_dt(st, config.params, grd, dt, n_steps)
        finals[g] = st.u

    rows = []
    for g in grids[:-1]:
        grd = grid_for(g)
        diff = finals[g] - _restrict(finals[finest], grd.ny, grd.nx)
        err = math.sqrt(float((diff * diff).sum()) * grd.cell_area)
        rows.append(ConvergenceRow(g, grd.ny, grd.hx, err))

    errs = np.array([row.err_l2_u for row in rows])
    hs = np.array([row.hx for row in rows])
    if errs.min() < 1e-13:
        order, note = None, "errors at machine floor; order not applicable"
    else:
        order = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
        note = ""
    return ConvergenceReport(rows, order, t_horizon, dt, note)
