"""Explicit time integration: stability bound, single steps, adaptive runs.

The scheme is forward Euler on u, w, z with the combined-flux/upwind spatial
operators, plus an exact exponential update of the ODE field v using the
start-of-step u and w:

    v <- v * min(exp(-dt (u + w)), 1)

The clamp is inert in exact arithmetic (u, w >= 0) and guarantees the
discrete max principle max v(t+dt) <= max v(t) exactly in floating point.

dt is adaptive: each attempt uses min(current dt, stable_dt, remaining time);
a step producing a non-finite or sign-violating state is rejected and dt is
halved, and accepted steps regrow dt by a factor 1.2. dt falling below
dt_min is a hard failure.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import backend as _backend
from ._fallback import STATUS_DT_UNDERFLOW, STATUS_OK, STATUS_STEP_BUDGET
from .errors import NumericalError, StabilityFloorWarning, StepRejected
from .model import Grid, Parameters, State, validate_state


def _require(cond: bool, key: str, constraint: str, value) -> None:
    if not cond:
        raise ValueError(f"{key}: must be {constraint} (got {value!r})")


@dataclass(frozen=True)
class StepControls:
    """Integration controls.

    dt_init                first attempted dt (also the regrowth seed)
    dt_min                 hard floor; needing dt below this is a failure
    safety                 multiplier in (0, 1] applied to the stability bound
    t_end                  final time of the run
    cfl_diff               diffusive CFL number (bound: cfl_diff*h^2/max D)
    positivity_guard       reaction bound: guard / max cell loss rate, so one
                           explicit step cannot remove more than this fraction
                           of a positive quantity
    max_steps_per_segment  attempt budget between consecutive record or
                           snapshot times; exhausting it is a failure (keeps
                           a dt_min-floored run from spinning forever)
    """

    dt_init: float = 1e-3
    dt_min: float = 1e-12
    safety: float = 0.9
    t_end: float = 60.0
    cfl_diff: float = 0.25
    positivity_guard: float = 0.9
    max_steps_per_segment: int = 10_000_000

    def __post_init__(self):
        _require(math.isfinite(self.dt_min) and self.dt_min > 0.0, "dt_min", "finite and > 0", self.dt_min)
        _require(math.isfinite(self.dt_init) and self.dt_init >= self.dt_min,
                 "dt_init", "finite and >= dt_min", self.dt_init)
        _require(math.isfinite(self.safety) and 0.0 < self.safety <= 1.0,
                 "safety", "in (0, 1]", self.safety)
        _require(math.isfinite(self.t_end) and self.t_end > 0.0, "t_end", "finite and > 0", self.t_end)
        _require(math.isfinite(self.cfl_diff) and self.cfl_diff > 0.0,
                 "cfl_diff", "finite and > 0", self.cfl_diff)
        _require(math.isfinite(self.positivity_guard) and 0.0 < self.positivity_guard <= 1.0,
                 "positivity_guard", "in (0, 1]", self.positivity_guard)
        _require(self.max_steps_per_segment >= 1, "max_steps_per_segment", ">= 1",
                 self.max_steps_per_segment)


def stable_dt(state: State, params: Parameters, grid: Grid,
              controls: StepControls, backend: str | None = None) -> float:
    """Largest dt the explicit update tolerates from this state.

    safety * min(diffusive, advective, reaction) with
        diffusive = cfl_diff * min(hx^2, hy^2) / max(1, d_w, d_z)
        advective = min(hx, hy) / max_faces |dv/dn|   (infinite for flat v)
        reaction  = positivity_guard / max_cells max(z + mu*max(u-1,0), 1+u)

    If the result falls below dt_min, returns dt_min and raises a
    StabilityFloorWarning. The adaptive driver applies this same formula
    before every attempted step.
    """
    kern = _backend.resolve(backend)
    gv_max, rate_max = kern.step_bounds(state.u, state.v, state.z,
                                        params.mu, grid.hx, grid.hy)
    diff_bound = controls.cfl_diff * min(grid.hx * grid.hx, grid.hy * grid.hy) \
        / max(1.0, params.d_w, params.d_z)
    adv_bound = (min(grid.hx, grid.hy) / gv_max) if gv_max > 0.0 else math.inf
    rea_bound = controls.positivity_guard / rate_max
    dt = controls.safety * min(diff_bound, adv_bound, rea_bound)
    if dt < controls.dt_min:
        warnings.warn(
            f"stability bound {dt:.3e} fell below dt_min={controls.dt_min:.3e}; "
            "using dt_min (expect rejected steps)",
            StabilityFloorWarning,
            stacklevel=2,
        )
        return controls.dt_min
    return dt


def step(state: State, params: Parameters, grid: Grid, dt: float,
         backend: str | None = None) -> State:
    """One explicit step of size dt. Raises StepRejected on an invalid result.

    The caller owns the retry policy (the adaptive driver halves dt); this
    function only signals. Arithmetic is identical to the driver's, so a
    fixed-dt loop of step() reproduces driver trajectories bit for bit.
    """
    if not (math.isfinite(dt) and dt > 0.0):
        raise ValueError(f"dt: must be finite and > 0 (got {dt!r})")
    st = validate_state(state, grid)
    kern = _backend.resolve(backend)
    un, wn, zn, varg = kern.step_uwz(st.u, st.v, st.w, st.z, params.mu,
                                     params.beta, params.d_w, params.d_z,
                                     grid.hx, grid.hy, dt)
    f = np.exp(varg)
    np.minimum(f, 1.0, out=f)
    vn = st.v * f
    if not (np.isfinite(un).all() and np.isfinite(wn).all()
            and np.isfinite(zn).all() and np.isfinite(vn).all()):
        raise StepRejected(f"step dt={dt:.6e} at t={st.t:.6e}: non-finite result")
    if un.min() <= 0.0:
        raise StepRejected(f"step dt={dt:.6e} at t={st.t:.6e}: u lost positivity "
                           f"(min {un.min():.6e})")
    if wn.min() < 0.0 or zn.min() < 0.0:
        raise StepRejected(f"step dt={dt:.6e} at t={st.t:.6e}: w or z went negative "
                           f"(min w {wn.min():.6e}, min z {zn.min():.6e})")
    return State(st.t + dt, un, vn, wn, zn)


def run_fixed_dt(state: State, params: Parameters, grid: Grid, dt: float,
                 n_steps: int, backend: str | None = None,
                 sample_every: int | None = None) -> tuple[State, list[State]]:
    """n_steps equal steps from state; no adaptivity, rejections propagate.

    Returns (final state, samples). samples holds the state every
    sample_every steps (including step 0 and the final step) when
    sample_every is given, otherwise stays empty.
    """
    st = validate_state(state, grid)
    samples: list[State] = []
    if sample_every is not None:
        samples.append(st.copy())
    for k in range(n_steps):
        st = step(st, params, grid, dt, backend=backend)
        if sample_every is not None and ((k + 1) % sample_every == 0 or k + 1 == n_steps):
            samples.append(st.copy())
    return st, samples


@dataclass
class Telemetry:
    """Per-run counters collected by the adaptive driver.

    vmax_violations counts accepted steps where max(v) increased; the scheme
    guarantees zero. wz_identity_max_rel is the largest deviation, relative
    to the current w+z mass, of the per-step identity
        sum(w+z)_new - sum(w+z)_old = -dt * ((1-beta) sum(w) + sum(z)).
    """

    steps: int = 0
    rejects: int = 0
    vmax_violations: int = 0
    wz_identity_max_rel: float = 0.0
    dt_floor_hits: int = 0


@dataclass
class RunResult:
    """Everything a finished (or failed) run produced."""

    records: list
    final_state: State
    telemetry: Telemetry
    stop_reason: str
    snapshots: dict[float, dict[str, np.ndarray]] = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.stop_reason.startswith("failed")


def _record_times(t_end: float, cadence: float) -> list[float]:
    """The record grid: multiples of cadence, always ending exactly at t_end."""
    n = int(math.floor(t_end / cadence + 1e-9))
    times = [cadence * k for k in range(1, n + 1)]
    if not times or times[-1] < t_end:
        times.append(t_end)
    elif times[-1] > t_end:
        times[-1] = t_end
    return times


def run(config, backend: str | None = None,
        on_record: Callable | None = None) -> RunResult:
    """Adaptive run of a scenario: records functionals at the output cadence,
    takes snapshots at the requested times, and integrates to t_end. Numerical
    failure raises NumericalError carrying the partial RunResult.
    """
    from .diagnostics import compute_functionals
    from .harness import build_initial_state

    params: Parameters = config.params
    grid: Grid = config.grid
    controls: StepControls = config.controls
    outputs = config.outputs
    kern = _backend.resolve(backend)

    state0 = validate_state(build_initial_state(config.initial, grid, config.seed), grid)
    if state0.t != 0.0:
        raise ValueError(f"initial state time: must be 0.0 (got {state0.t!r})")
    for ts in outputs.snapshot_times:
        if not (0.0 <= ts <= controls.t_end):
            raise ValueError(
                f"snapshot_times: must lie in [0, t_end={controls.t_end}] (got {ts!r})"
            )

    u = state0.u.copy()
    v = state0.v.copy()
    w = state0.w.copy()
    z = state0.z.copy()

    record_set = set(_record_times(controls.t_end, outputs.cadence))
    snapshot_set = {float(ts) for ts in outputs.snapshot_times}
    targets = sorted(record_set | {ts for ts in snapshot_set if ts > 0.0})

    def grab_fields():
        return {"u": u.copy(), "v": v.copy(), "w": w.copy(), "z": z.copy()}

    telemetry = Telemetry()
    snapshots: dict[float, dict[str, np.ndarray]] = {}
    if 0.0 in snapshot_set:
        snapshots[0.0] = grab_fields()

    rec = compute_functionals(State(0.0, u, v, w, z), params, grid,
                              p=outputs.p, prev=None)
    records = [rec]
    if on_record is not None:
        on_record(rec)

    t = 0.0
    dt_cur = float(controls.dt_init)
    vmax_prev = float(v.max())
    stop_reason = "t_end"

    for t_target in targets:
        status, t, dt_cur, steps, rejects, vviol, vmax_prev, wz_rel, floors = kern.advance(
            u, v, w, z, t, t_target, dt_cur,
            params.mu, params.beta, params.d_w, params.d_z,
            grid.hx, grid.hy,
            controls.dt_min, controls.safety, controls.cfl_diff,
            controls.positivity_guard, controls.max_steps_per_segment,
            vmax_prev,
        )
        telemetry.steps += steps
        telemetry.rejects += rejects
        telemetry.vmax_violations += vviol
        telemetry.wz_identity_max_rel = max(telemetry.wz_identity_max_rel, wz_rel)
        telemetry.dt_floor_hits += floors

        if status != STATUS_OK:
            if status == STATUS_DT_UNDERFLOW:
                why = f"dt underflow below dt_min={controls.dt_min:.3e}"
            elif status == STATUS_STEP_BUDGET:
                why = (f"step budget {controls.max_steps_per_segment} exhausted "
                       f"before reaching t={t_target:.6g}")
            else:
                why = f"driver status {status}"
            stop_reason = f"failed: {why} at t={t:.9g}"
            result = RunResult(records, State(t, u, v, w, z), telemetry,
                               stop_reason, snapshots)
            raise NumericalError(
                f"{stop_reason}; state: min u {u.min():.6e}, max u {u.max():.6e}, "
                f"max v {v.max():.6e}, max w {w.max():.6e}, max z {z.max():.6e}",
                result=result,
            )

        state_now = State(t, u, v, w, z)
        if t_target in snapshot_set:
            snapshots[t_target] = grab_fields()
        if t_target in record_set:
            rec = compute_functionals(state_now, params, grid,
                                      p=outputs.p, prev=records[-1])
            records.append(rec)
            if len(records) >= 2:
                records[-2]._a = None  # only the newest record feeds the chain
            if on_record is not None:
                on_record(rec)

    return RunResult(records, State(t, u, v, w, z), telemetry, stop_reason, snapshots)
