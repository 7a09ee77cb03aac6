"""Functionals, property checks, and decay-rate fitting.

Spatial integrals use the midpoint rule (sum of cell values times cell
area). The time accumulators chain record to record: acc_u_sq and
acc_aev_sq by the trapezoid rule on their instantaneous integrands, and
acc_at_sq by a rectangle rule on the squared finite difference of
a = u exp(-v) between records. All three are nondecreasing by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields

import numpy as np

from .discretization import discrete_gradient_sq
from .errors import FieldError
from .model import Grid, Parameters, State, transform_a

CSV_COLUMNS = (
    "t", "mass_u", "mass_w", "mass_z", "weighted_mass", "wz_mass",
    "linf_u", "linf_v", "linf_w", "linf_z",
    "l2_u_minus_1", "lp_u_minus_1", "min_u",
    "lyapunov", "dirichlet_a", "grad_w_l3", "grad_z_l3",
    "acc_u_sq", "acc_aev_sq", "acc_at_sq",
)

A_FLOOR = 1e-300  # below this the Lyapunov log is no longer trustworthy


@dataclass
class FunctionalRecord:
    """One row of functionals.csv; field order is the column order.

    weighted_mass is 2*beta*(mass of u) + 2*beta*(mass of w) + mass of z,
    the combination whose dissipation controls the total mass. lyapunov is
    the relative-entropy functional int e^v (a - 1 - ln a); it is nonnegative
    for every state. The acc_* fields are running space-time integrals of
    u^2, (u - 1)^2 (equal to (a e^v - 1)^2), and a_t^2.
    """

    t: float
    mass_u: float
    mass_w: float
    mass_z: float
    weighted_mass: float
    wz_mass: float
    linf_u: float
    linf_v: float
    linf_w: float
    linf_z: float
    l2_u_minus_1: float
    lp_u_minus_1: float
    min_u: float
    lyapunov: float
    dirichlet_a: float
    grad_w_l3: float
    grad_z_l3: float
    acc_u_sq: float
    acc_aev_sq: float
    acc_at_sq: float
    _a: np.ndarray | None = field(default=None, repr=False, compare=False)
    _int_u_sq: float = field(default=0.0, repr=False, compare=False)
    _int_aev_sq: float = field(default=0.0, repr=False, compare=False)

    def as_row(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in CSV_COLUMNS)


def compute_functionals(state: State, params: Parameters, grid: Grid,
                        p: float = 3.0, prev: FunctionalRecord | None = None) -> FunctionalRecord:
    """Evaluate every monitored functional at state.t.

    prev must be the record of the previous evaluation of the same run (or
    None at t=0); it carries the integrand values and the a field needed to
    extend the accumulators. Hard errors: u not strictly positive, or a
    below 1e-300 (its logarithm would be meaningless).
    """
    if not (math.isfinite(p) and p >= 1.0):
        raise ValueError(f"p: must be finite and >= 1 (got {p!r})")
    u, v, w, z = state.fields()
    area = grid.cell_area
    a = transform_a(state)  # raises FieldError unless u > 0
    a_min = float(a.min())
    if a_min < A_FLOOR:
        raise FieldError(
            f"a = u*exp(-v) reached {a_min!r} at t={state.t!r}, below {A_FLOOR:g}; "
            "the Lyapunov integrand is no longer representable"
        )

    mass_u = float(u.sum()) * area
    mass_w = float(w.sum()) * area
    mass_z = float(z.sum()) * area
    weighted = 2.0 * params.beta * mass_u + 2.0 * params.beta * mass_w + mass_z
    wz_mass = mass_w + mass_z

    d = a - 1.0
    lyap = float((np.exp(v) * (d - np.log1p(d))).sum()) * area
    dirichlet = float((np.exp(v) * discrete_gradient_sq(a, grid)).sum()) * area
    gw3 = float((discrete_gradient_sq(w, grid) ** 1.5).sum()) * area
    gz3 = float((discrete_gradient_sq(z, grid) ** 1.5).sum()) * area

    um1 = u - 1.0
    int_u_sq = float((u * u).sum()) * area
    int_aev_sq = float((um1 * um1).sum()) * area

    if prev is None:
        acc_u_sq = 0.0
        acc_aev_sq = 0.0
        acc_at_sq = 0.0
    else:
        if prev._a is None:
            raise ValueError("prev record no longer carries its a field; "
                             "chain records in evaluation order")
        dt_rec = state.t - prev.t
        if dt_rec <= 0.0:
            raise ValueError(f"records must advance in time (prev t={prev.t!r}, "
                             f"state t={state.t!r})")
        acc_u_sq = prev.acc_u_sq + 0.5 * dt_rec * (prev._int_u_sq + int_u_sq)
        acc_aev_sq = prev.acc_aev_sq + 0.5 * dt_rec * (prev._int_aev_sq + int_aev_sq)
        da = a - prev._a
        acc_at_sq = prev.acc_at_sq + float((da * da).sum()) * area / dt_rec

    return FunctionalRecord(
        t=state.t,
        mass_u=mass_u,
        mass_w=mass_w,
        mass_z=mass_z,
        weighted_mass=weighted,
        wz_mass=wz_mass,
        linf_u=float(np.abs(u).max()),
        linf_v=float(np.abs(v).max()),
        linf_w=float(np.abs(w).max()),
        linf_z=float(np.abs(z).max()),
        l2_u_minus_1=math.sqrt(int_aev_sq),
        lp_u_minus_1=float((np.abs(um1) ** p).sum() * area) ** (1.0 / p),
        min_u=float(u.min()),
        lyapunov=lyap,
        dirichlet_a=dirichlet,
        grad_w_l3=gw3 ** (1.0 / 3.0),
        grad_z_l3=gz3 ** (1.0 / 3.0),
        acc_u_sq=acc_u_sq,
        acc_aev_sq=acc_aev_sq,
        acc_at_sq=acc_at_sq,
        _a=a,
        _int_u_sq=int_u_sq,
        _int_aev_sq=int_aev_sq,
    )


def record_series(records: list[FunctionalRecord], name: str) -> tuple[np.ndarray, np.ndarray]:
    """(times, values) arrays for one record field."""
    valid = {f.name for f in fields(FunctionalRecord)} - {"_a", "_int_u_sq", "_int_aev_sq"}
    if name not in valid:
        raise ValueError(f"unknown functional {name!r}; expected one of {sorted(valid)}")
    t = np.array([r.t for r in records], dtype=np.float64)
    y = np.array([getattr(r, name) for r in records], dtype=np.float64)
    return t, y


def fit_decay_rate(t, y, window: tuple[float, float] | None = None) -> float:
    """Exponential decay rate of y(t): minus the least-squares slope of ln y.

    window restricts the fit to t in [lo, hi]. Requires at least 10 samples
    and strictly positive values; exact on synthetic log-linear data.
    """
    t = np.asarray(t, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if window is not None:
        lo, hi = window
        mask = (t >= lo) & (t <= hi)
        t, y = t[mask], y[mask]
    if t.size < 10:
        raise ValueError(f"fit_decay_rate: need at least 10 samples, got {t.size}")
    if y.min() <= 0.0:
        raise ValueError("fit_decay_rate: values must be strictly positive "
                         f"(min {y.min()!r})")
    slope, _ = np.polyfit(t, np.log(y), 1)
    return -float(slope)


# --- check reports ---------------------------------------------------------

PASS = "pass"
FAIL = "fail"
INAPPLICABLE = "inapplicable"

_OPS = {
    "<=": lambda v, b: v <= b,
    ">=": lambda v, b: v >= b,
    "<": lambda v, b: v < b,
    ">": lambda v, b: v > b,
}


@dataclass(frozen=True)
class CheckLine:
    """One assertion: its measured value, its bound, and the comparison."""

    name: str
    value: float
    bound: float
    op: str
    status: str
    note: str = ""

    def format(self) -> str:
        text = (f"{self.status:<13} {self.name:<36} value={self.value:.17g} "
                f"{self.op} bound={self.bound:.17g}")
        if self.note:
            text += f"  [{self.note}]"
        return text


def assert_line(name: str, value: float, bound: float, op: str, note: str = "") -> CheckLine:
    status = PASS if _OPS[op](value, bound) else FAIL
    return CheckLine(name, float(value), float(bound), op, status, note)


def inapplicable_line(name: str, note: str) -> CheckLine:
    return CheckLine(name, math.nan, math.nan, "<=", INAPPLICABLE, note)


@dataclass
class CheckReport:
    """A named group of check lines; fails if any line fails."""

    suite: str
    lines: list[CheckLine]

    @property
    def passed(self) -> bool:
        return all(line.status != FAIL for line in self.lines)

    def format(self) -> str:
        out = [f"# suite: {self.suite}"]
        out.extend(line.format() for line in self.lines)
        return "\n".join(out)


def _final_window_sup(t: np.ndarray, y: np.ndarray, fraction: float) -> tuple[float, float, float]:
    """(global sup, sup over the trailing fraction, cut time)."""
    cut = t[0] + (1.0 - fraction) * (t[-1] - t[0])
    tail = y[t >= cut]
    return float(y.max()), float(tail.max()) if tail.size else 0.0, float(cut)


def check_wz_decay(records, params: Parameters, identity_max_rel: float | None = None,
                   envelope_tol: float = 1e-8) -> CheckReport:
    """Exponential decay of the combined w+z mass (only meaningful for beta < 1).

    Asserts the envelope wz(t) <= wz(0) * exp(-(1-beta) t) * (1 + tol) at
    every record, that the fitted decay rate reaches at least 1-beta, and,
    when the driver telemetry is supplied, the per-step mass identity.
    """
    lines: list[CheckLine] = []
    if params.beta >= 1.0:
        lines.append(inapplicable_line(
            "wz_envelope", f"beta={params.beta:g} >= 1: no decay guarantee"))
        return CheckReport("wz_decay", lines)

    t, wz = record_series(records, "wz_mass")
    rate0 = 1.0 - params.beta
    wz0 = wz[0]
    if wz0 <= 0.0:
        lines.append(assert_line("wz_envelope", float(np.abs(wz).max()), 0.0, "<=",
                                 "wz starts at zero and must stay there"))
    else:
        ratio = wz * np.exp(rate0 * (t - t[0])) / wz0
        lines.append(assert_line("wz_envelope", float(ratio.max()),
                                 1.0 + envelope_tol, "<="))
        mid = t[0] + 0.5 * (t[-1] - t[0])
        window = (mid, t[-1])
        in_window = (t >= mid)
        if wz[in_window].min() > 0.0 and int(in_window.sum()) >= 10:
            rate = fit_decay_rate(t, wz, window)
            # 1e-9 relative slack: the fit equals the floor exactly when the
            # envelope is tight, up to least-squares roundoff
            lines.append(assert_line("wz_fitted_rate", rate,
                                     rate0 * (1.0 - 1e-9), ">=",
                                     f"fit window [{mid:g}, {t[-1]:g}]"))
        else:
            lines.append(inapplicable_line(
                "wz_fitted_rate", "too few samples or wz hit zero in the fit window"))
    if identity_max_rel is not None:
        lines.append(assert_line("wz_step_identity_max_rel", identity_max_rel,
                                 1e-12, "<=",
                                 "per-step mass identity, relative to w+z mass"))
    return CheckReport("wz_decay", lines)


def check_boundedness(records, params: Parameters | None = None,
                      horizon_fraction: float = 0.25,
                      growth_tol: float = 1.05) -> CheckReport:
    """The four sup norms stay bounded: their sum peaks before the final
    horizon fraction and the final-quarter sup stays within growth_tol of the
    global sup. Also applies the same trend test to the Dirichlet energy and
    the gradient L3 norms, and checks the unit-window space-time bound on u^2.
    """
    lines: list[CheckLine] = []
    t, _ = record_series(records, "t")
    total = np.zeros_like(t)
    for name in ("linf_u", "linf_v", "linf_w", "linf_z"):
        _, y = record_series(records, name)
        total += y
        lines.append(assert_line(f"sup_{name}", float(y.max()), math.inf, "<="))

    sup, tail_sup, cut = _final_window_sup(t, total, horizon_fraction)
    t_at_sup = float(t[int(np.argmax(total))])
    lines.append(assert_line("linf_total_sup_time", t_at_sup, cut, "<",
                             "global sup must occur before the final quarter"))
    lines.append(assert_line("linf_total_tail_ratio",
                             tail_sup / sup if sup > 0.0 else 0.0,
                             growth_tol, "<="))

    for name in ("dirichlet_a", "grad_w_l3", "grad_z_l3"):
        _, y = record_series(records, name)
        s, tail, _ = _final_window_sup(t, y, horizon_fraction)
        ratio = tail / s if s > 0.0 else 0.0
        lines.append(assert_line(f"{name}_tail_ratio", ratio, growth_tol, "<="))

    span = t[-1] - t[0]
    if params is not None and params.mu == 0.0:
        lines.append(inapplicable_line("u_sq_unit_window_ratio",
                                       "mu=0: no space-time bound"))
    elif span < 2.0:
        lines.append(inapplicable_line("u_sq_unit_window_ratio",
                                       f"horizon {span:g} too short for unit windows"))
    else:
        _, acc = record_series(records, "acc_u_sq")
        starts = t[t <= t[-1] - 1.0]
        windows = np.interp(starts + 1.0, t, acc) - np.interp(starts, t, acc)
        first_half = windows[starts <= t[0] + 0.5 * (t[-1] - 1.0 - t[0])]
        ratio = float(windows.max() / first_half.max()) if first_half.max() > 0.0 else 0.0
        lines.append(assert_line("u_sq_unit_window_ratio", ratio, 1.01, "<=",
                                 "unit-window space-time integral of u^2"))
    return CheckReport("boundedness", lines)


def check_stabilization(records, params: Parameters,
                        eps_linf: float = 1e-3, eps_l2: float = 1e-2,
                        delta_floor: float = 0.01,
                        final_l2_a_minus_1: float | None = None) -> CheckReport:
    """Convergence to (1, 0, 0, 0): applicable only when mu > 0 and beta < 1.

    Final-record norms must be small, u must hold a positive floor over the
    final half, and v's fitted decay rate must beat half that floor (the
    proven rate is the u floor itself).
    """
    if not (params.mu > 0.0 and params.beta < 1.0):
        return CheckReport("stabilization", [inapplicable_line(
            "stabilization_gate",
            f"requires mu > 0 and beta < 1 (mu={params.mu:g}, beta={params.beta:g})")])

    lines = []
    last = records[-1]
    lines.append(assert_line("final_lp_u_minus_1", last.lp_u_minus_1, eps_l2, "<="))
    lines.append(assert_line("final_l2_u_minus_1", last.l2_u_minus_1, eps_l2, "<="))
    for name in ("linf_v", "linf_w", "linf_z"):
        lines.append(assert_line(f"final_{name}", getattr(last, name), eps_linf, "<="))
    if final_l2_a_minus_1 is not None:
        lines.append(assert_line("final_l2_a_minus_1", final_l2_a_minus_1, eps_l2, "<="))

    t, min_u = record_series(records, "min_u")
    mid = t[0] + 0.5 * (t[-1] - t[0])
    floor = float(min_u[t >= mid].min())
    lines.append(assert_line("min_u_final_half", floor, delta_floor, ">="))

    _, linf_v = record_series(records, "linf_v")
    tail_v = linf_v[t >= mid]
    if tail_v.max() <= eps_linf:
        # decay already happened; a rate fit on residual noise means nothing
        lines.append(assert_line("v_decay_rate", math.inf, 0.5 * floor, ">=",
                                 "v at or below the stabilization threshold "
                                 "over the whole final half"))
    elif tail_v.min() <= 0.0 or tail_v.size < 10:
        lines.append(inapplicable_line("v_decay_rate",
                                       "v hit zero or too few samples in the fit window"))
    else:
        rate = fit_decay_rate(t, linf_v, (mid, t[-1]))
        lines.append(assert_line("v_decay_rate", rate, 0.5 * floor, ">=",
                                 "rate must beat half the final-half u floor"))
    return CheckReport("stabilization", lines)


def check_lyapunov_budget(records, params: Parameters,
                          tail_fraction: float = 0.1,
                          tail_budget: float = 0.01,
                          final_bound: float = 1e-6) -> CheckReport:
    """The Lyapunov functional decays and its dissipation budget is spent:
    the accumulators gain at most 1% of their totals over the final 10% of
    the horizon and the functional itself ends near zero. Applicable when
    mu > 0 and beta < 1.
    """
    lines = [  # nonnegativity holds for every run, gated or not
        assert_line("lyapunov_min",
                    float(min(r.lyapunov for r in records)), 0.0, ">=")
    ]
    if not (params.mu > 0.0 and params.beta < 1.0):
        lines.append(inapplicable_line(
            "lyapunov_budget_gate",
            f"requires mu > 0 and beta < 1 (mu={params.mu:g}, beta={params.beta:g})"))
        return CheckReport("lyapunov", lines)

    t, _ = record_series(records, "t")
    t_tail = t[0] + (1.0 - tail_fraction) * (t[-1] - t[0])
    for name in ("acc_aev_sq", "acc_at_sq"):
        _, acc = record_series(records, name)
        total = acc[-1]
        at_cut = float(np.interp(t_tail, t, acc))
        frac = (total - at_cut) / total if total > 0.0 else 0.0
        lines.append(assert_line(f"{name}_tail_fraction", frac, tail_budget, "<=",
                                 f"gain over t >= {t_tail:g} relative to total"))
    lines.append(assert_line("final_lyapunov", records[-1].lyapunov, final_bound, "<="))
    return CheckReport("lyapunov", lines)


SUITES = ("all", "boundedness", "decay", "stabilization", "lyapunov")


def run_suite(result, config, suite: str = "all") -> list[CheckReport]:
    """Assemble the check reports for one finished run.

    Always includes the per-run invariants (v max principle, wz_mass
    consistency, nondecreasing accumulators, Lyapunov nonnegativity); the
    named suite adds its specific report, and "all" adds every one.
    """
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES}")
    records = result.records
    params = config.params
    tele = result.telemetry

    inv = [assert_line("vmax_violations", float(tele.vmax_violations), 0.0, "<=",
                       "accepted steps where max(v) increased")]
    wz_dev = max(abs(r.wz_mass - (r.mass_w + r.mass_z)) / max(1.0, r.wz_mass)
                 for r in records)
    inv.append(assert_line("wz_mass_consistency", wz_dev, 1e-14, "<="))
    for name in ("acc_u_sq", "acc_aev_sq", "acc_at_sq"):
        _, acc = record_series(records, name)
        worst = float(np.diff(acc).min()) if acc.size > 1 else 0.0
        inv.append(assert_line(f"{name}_nondecreasing", worst, 0.0, ">=",
                               "smallest increment between records"))
    inv.append(assert_line("lyapunov_min",
                           float(min(r.lyapunov for r in records)), 0.0, ">="))
    n_bad = sum(1 for r in records for x in r.as_row() if not math.isfinite(x))
    inv.append(assert_line("records_finite", float(n_bad), 0.0, "<=",
                           "count of non-finite record entries"))
    reports = [CheckReport("invariants", inv)]

    final_l2_a = None
    if suite in ("all", "stabilization"):
        st = result.final_state
        a = transform_a(st)
        da = a - 1.0
        final_l2_a = math.sqrt(float((da * da).sum()) * config.grid.cell_area)

    if suite in ("all", "boundedness"):
        reports.append(check_boundedness(records, params))
    if suite in ("all", "decay"):
        reports.append(check_wz_decay(records, params,
                                      identity_max_rel=tele.wz_identity_max_rel))
    if suite in ("all", "stabilization"):
        reports.append(check_stabilization(records, params,
                                           delta_floor=config.outputs.delta_floor,
                                           final_l2_a_minus_1=final_l2_a))
    if suite in ("all", "lyapunov"):
        reports.append(check_lyapunov_budget(records, params))
    return reports
