"""Pure-numpy stepping kernels: the reference backend.

The compiled extension (_core) mirrors these expression trees operation for
operation so both backends produce bitwise-identical trajectories; change the
arithmetic in both files together or not at all.

Kernel contract (shared with _core):

step_uwz     one forward-Euler update of u, w, z plus the exponent array
             varg = -dt*(u+w) for the exact v update.
step_bounds  reductions feeding the stability bound: the largest face
             gradient of v and the largest cellwise loss rate.
advance      drives accepted steps from t to t_target with adaptive dt
             (halve on rejection, regrow by 1.2), updating the field arrays
             in place. Returns
             (status, t, dt_cur, steps, rejects, vmax_violations, vmax,
              wz_identity_max_rel, dt_floor_hits)
             with status one of STATUS_OK / STATUS_DT_UNDERFLOW /
             STATUS_STEP_BUDGET.
"""

from __future__ import annotations

import math

import numpy as np

STATUS_OK = 0
STATUS_DT_UNDERFLOW = 1
STATUS_STEP_BUDGET = 2

compiled = False


def step_uwz(u, v, w, z, mu, beta, d_w, d_z, hx, hy, dt):
    """One explicit update of u, w, z; returns (un, wn, zn, varg).

    u uses the combined flux grad u - u_upw grad v (donor-cell upwinding,
    zero on boundary faces); w and z use diffusive fluxes. varg is the
    exponent of the exact v update v <- v * exp(varg), built from the
    start-of-step u and w.
    """
    ny, nx = u.shape
    fu_x = np.zeros((ny, nx + 1), dtype=np.float64)
    fw_x = np.zeros((ny, nx + 1), dtype=np.float64)
    fz_x = np.zeros((ny, nx + 1), dtype=np.float64)
    fu_y = np.zeros((ny + 1, nx), dtype=np.float64)
    fw_y = np.zeros((ny + 1, nx), dtype=np.float64)
    fz_y = np.zeros((ny + 1, nx), dtype=np.float64)

    gu = (u[:, 1:] - u[:, :-1]) / hx
    gv = (v[:, 1:] - v[:, :-1]) / hx
    up = np.where(gv > 0.0, u[:, :-1], u[:, 1:])
    fu_x[:, 1:-1] = gu - up * gv
    fw_x[:, 1:-1] = d_w * (w[:, 1:] - w[:, :-1]) / hx
    fz_x[:, 1:-1] = d_z * (z[:, 1:] - z[:, :-1]) / hx

    gu = (u[1:, :] - u[:-1, :]) / hy
    gv = (v[1:, :] - v[:-1, :]) / hy
    up = np.where(gv > 0.0, u[:-1, :], u[1:, :])
    fu_y[1:-1, :] = gu - up * gv
    fw_y[1:-1, :] = d_w * (w[1:, :] - w[:-1, :]) / hy
    fz_y[1:-1, :] = d_z * (z[1:, :] - z[:-1, :]) / hy

    div_u = (fu_x[:, 1:] - fu_x[:, :-1]) / hx + (fu_y[1:, :] - fu_y[:-1, :]) / hy
    div_w = (fw_x[:, 1:] - fw_x[:, :-1]) / hx + (fw_y[1:, :] - fw_y[:-1, :]) / hy
    div_z = (fz_x[:, 1:] - fz_x[:, :-1]) / hx + (fz_y[1:, :] - fz_y[:-1, :]) / hy

    uz = u * z
    un = u + dt * (div_u + (mu * u * (1.0 - u) - uz))
    wn = w + dt * (div_w + (uz - w))
    zn = z + dt * (div_z + ((beta * w - z) - uz))
    varg = (-dt) * (u + w)
    return un, wn, zn, varg


def step_bounds(u, v, z, mu, hx, hy):
    """Reductions for stable_dt: (max |dv/dn| over faces, max cell loss rate).

    The loss rate per cell is max(z + mu*max(u-1, 0), 1 + u): the first entry
    is u's decay rate, the second dominates both w's rate 1 and z's rate 1+u.
    """
    gvx = np.abs((v[:, 1:] - v[:, :-1]) / hx)
    gvy = np.abs((v[1:, :] - v[:-1, :]) / hy)
    gv_max = 0.0
    if gvx.size:
        gv_max = max(gv_max, float(gvx.max()))
    if gvy.size:
        gv_max = max(gv_max, float(gvy.max()))
    rate = np.maximum(z + mu * np.maximum(u - 1.0, 0.0), 1.0 + u)
    return gv_max, float(rate.max())


def advance(u, v, w, z, t, t_target, dt_cur, mu, beta, d_w, d_z, hx, hy,
            dt_min, safety, cfl_diff, positivity_guard, max_steps, vmax_prev):
    """Advance the state in place from t to t_target. See module docstring."""
    steps = 0
    rejects = 0
    vviol = 0
    floor_hits = 0
    wz_rel_max = 0.0
    status = STATUS_OK
    diff_bound = cfl_diff * min(hx * hx, hy * hy) / max(1.0, d_w, d_z)
    sw_old = float(w.sum())
    sz_old = float(z.sum())
    while True:
        rem = t_target - t
        if rem <= 0.0:
            break
        if steps + rejects >= max_steps:
            status = STATUS_STEP_BUDGET
            break
        gv_max, rate_max = step_bounds(u, v, z, mu, hx, hy)
        adv_bound = (min(hx, hy) / gv_max) if gv_max > 0.0 else math.inf
        rea_bound = positivity_guard / rate_max
        dt_stable = safety * min(diff_bound, adv_bound, rea_bound)
        if dt_stable < dt_min:
            dt_stable = dt_min
            floor_hits += 1
        dt_try = min(dt_cur, dt_stable, rem)
        un, wn, zn, varg = step_uwz(u, v, w, z, mu, beta, d_w, d_z, hx, hy, dt_try)
        f = np.exp(varg)
        np.minimum(f, 1.0, out=f)
        vn = v * f
        ok = (np.isfinite(un).all() and np.isfinite(wn).all()
              and np.isfinite(zn).all() and np.isfinite(vn).all()
              and un.min() > 0.0 and wn.min() >= 0.0 and zn.min() >= 0.0)
        if not ok:
            rejects += 1
            dt_cur = 0.5 * dt_try
            if dt_cur < dt_min:
                status = STATUS_DT_UNDERFLOW
                break
            continue
        vmax_new = float(vn.max())
        if vmax_new > vmax_prev:
            vviol += 1
        vmax_prev = vmax_new
        sw_new = float(wn.sum())
        sz_new = float(zn.sum())
        lhs = (sw_new + sz_new) - (sw_old + sz_old)
        rhs = dt_try * (-((1.0 - beta) * sw_old + sz_old))
        denom = sw_old + sz_old
        rel = abs(lhs - rhs) / denom if denom > 0.0 else abs(lhs - rhs)
        if rel > wz_rel_max:
            wz_rel_max = rel
        u[...] = un
        v[...] = vn
        w[...] = wn
        z[...] = zn
        sw_old = sw_new
        sz_old = sz_new
        steps += 1
        if dt_try >= rem:
            t = t_target
            break
        t = t + dt_try
        dt_cur = min(dt_cur, dt_stable) * 1.2
    return (status, t, dt_cur, steps, rejects, vviol, vmax_prev,
            wz_rel_max, floor_hits)
