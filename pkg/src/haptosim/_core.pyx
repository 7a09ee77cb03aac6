# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled stepping kernels.

Mirrors haptosim._fallback expression tree for expression tree: every face
flux, reaction term, and bound is written with the same association order as
the numpy reference so the two backends produce bitwise-identical
trajectories (the build uses -ffp-contract=off to keep multiply-adds
unfused). The v update goes through numpy's exp on a buffer, again so both
backends share one exp implementation. Change _fallback and this file
together or not at all.
"""

import numpy as np

from libc.math cimport INFINITY, fabs, fmax, fmin, isfinite

STATUS_OK = 0
STATUS_DT_UNDERFLOW = 1
STATUS_STEP_BUDGET = 2

compiled = True


cdef int _step_cells(const double[:, ::1] u, const double[:, ::1] v,
                     const double[:, ::1] w, const double[:, ::1] z,
                     double[:, ::1] un, double[:, ::1] wn, double[:, ::1] zn,
                     double[:, ::1] varg,
                     double mu, double beta, double d_w, double d_z,
                     double hx, double hy, double dt,
                     double* sw_new, double* sz_new,
                     double* min_u, double* min_w, double* min_z) noexcept nogil:
    """Forward-Euler update of u, w, z; writes varg = -dt*(u+w).

    Also accumulates Kahan-compensated sums of the new w and z and tracks
    their minima. Returns 1 when every written value is finite.
    """
    cdef Py_ssize_t ny = u.shape[0], nx = u.shape[1], i, j
    cdef double uij, vij, wij, zij, uz
    cdef double gu, gv, up
    cdef double fu_l, fu_r, fu_b, fu_t
    cdef double fw_l, fw_r, fw_b, fw_t
    cdef double fz_l, fz_r, fz_b, fz_t
    cdef double div_u, div_w, div_z, u_new, w_new, z_new
    cdef double mu_val = 0.0, mw_val = 0.0, mz_val = 0.0
    cdef double sw = 0.0, cw = 0.0, sz = 0.0, cz = 0.0, y, tt
    cdef int finite = 1
    cdef int first = 1

    for j in range(ny):
        # x-face fluxes carry across the row: the left face of cell i is the
        # right face of cell i-1, computed from the identical expression.
        fu_l = 0.0
        fw_l = 0.0
        fz_l = 0.0
        for i in range(nx):
            uij = u[j, i]
            vij = v[j, i]
            wij = w[j, i]
            zij = z[j, i]

            if i < nx - 1:
                gu = (u[j, i + 1] - uij) / hx
                gv = (v[j, i + 1] - vij) / hx
                up = uij if gv > 0.0 else u[j, i + 1]
                fu_r = gu - up * gv
                fw_r = (d_w * (w[j, i + 1] - wij)) / hx
                fz_r = (d_z * (z[j, i + 1] - zij)) / hx
            else:
                fu_r = 0.0
                fw_r = 0.0
                fz_r = 0.0

            if j > 0:
                gu = (uij - u[j - 1, i]) / hy
                gv = (vij - v[j - 1, i]) / hy
                up = u[j - 1, i] if gv > 0.0 else uij
                fu_b = gu - up * gv
                fw_b = (d_w * (wij - w[j - 1, i])) / hy
                fz_b = (d_z * (zij - z[j - 1, i])) / hy
            else:
                fu_b = 0.0
                fw_b = 0.0
                fz_b = 0.0

            if j < ny - 1:
                gu = (u[j + 1, i] - uij) / hy
                gv = (v[j + 1, i] - vij) / hy
                up = uij if gv > 0.0 else u[j + 1, i]
                fu_t = gu - up * gv
                fw_t = (d_w * (w[j + 1, i] - wij)) / hy
                fz_t = (d_z * (z[j + 1, i] - zij)) / hy
            else:
                fu_t = 0.0
                fw_t = 0.0
                fz_t = 0.0

            div_u = (fu_r - fu_l) / hx + (fu_t - fu_b) / hy
            div_w = (fw_r - fw_l) / hx + (fw_t - fw_b) / hy
            div_z = (fz_r - fz_l) / hx + (fz_t - fz_b) / hy

            uz = uij * zij
            u_new = uij + dt * (div_u + ((mu * uij) * (1.0 - uij) - uz))
            w_new = wij + dt * (div_w + (uz - wij))
            z_new = zij + dt * (div_z + (((beta * wij) - zij) - uz))

            un[j, i] = u_new
            wn[j, i] = w_new
            zn[j, i] = z_new
            varg[j, i] = (-dt) * (uij + wij)

            if not (isfinite(u_new) and isfinite(w_new) and isfinite(z_new)):
                finite = 0
            if first:
                mu_val = u_new
                mw_val = w_new
                mz_val = z_new
                first = 0
            else:
                if u_new < mu_val:
                    mu_val = u_new
                if w_new < mw_val:
                    mw_val = w_new
                if z_new < mz_val:
                    mz_val = z_new

            y = w_new - cw
            tt = sw + y
            cw = (tt - sw) - y
            sw = tt
            y = z_new - cz
            tt = sz + y
            cz = (tt - sz) - y
            sz = tt

            fu_l = fu_r
            fw_l = fw_r
            fz_l = fz_r

    sw_new[0] = sw
    sz_new[0] = sz
    min_u[0] = mu_val
    min_w[0] = mw_val
    min_z[0] = mz_val
    return finite


cdef void _bounds(const double[:, ::1] u, const double[:, ::1] v,
                  const double[:, ::1] z, double mu, double hx, double hy,
                  double* gv_max, double* rate_max) noexcept nogil:
    """Max face gradient of v and max cellwise loss rate (see _fallback)."""
    cdef Py_ssize_t ny = u.shape[0], nx = u.shape[1], i, j
    cdef double g = 0.0, r = 0.0, a, excess, r1, r2
    for j in range(ny):
        for i in range(1, nx):
            a = fabs((v[j, i] - v[j, i - 1]) / hx)
            if a > g:
                g = a
    for j in range(1, ny):
        for i in range(nx):
            a = fabs((v[j, i] - v[j - 1, i]) / hy)
            if a > g:
                g = a
    for j in range(ny):
        for i in range(nx):
            excess = u[j, i] - 1.0
            if excess < 0.0:
                excess = 0.0
            r1 = z[j, i] + mu * excess
            r2 = 1.0 + u[j, i]
            a = r1 if r1 > r2 else r2
            if a > r:
                r = a
    gv_max[0] = g
    rate_max[0] = r


cdef int _v_scan(const double[:, ::1] vn, double* vmax) noexcept nogil:
    """Max of the updated v and a finiteness flag, in one pass."""
    cdef Py_ssize_t ny = vn.shape[0], nx = vn.shape[1], i, j
    cdef double m = -INFINITY, x
    cdef int finite = 1
    for j in range(ny):
        for i in range(nx):
            x = vn[j, i]
            if not isfinite(x):
                finite = 0
            if x > m:
                m = x
    vmax[0] = m
    return finite


def step_uwz(u, v, w, z, double mu, double beta, double d_w, double d_z,
             double hx, double hy, double dt):
    """One explicit update of u, w, z; returns (un, wn, zn, varg).

    Same contract as haptosim._fallback.step_uwz.
    """
    cdef double sw, sz, m_u, m_w, m_z
    un = np.empty_like(u)
    wn = np.empty_like(u)
    zn = np.empty_like(u)
    varg = np.empty_like(u)
    cdef const double[:, ::1] cu = u, cv = v, cw = w, cz = z
    cdef double[:, ::1] xu = un, xw = wn, xz = zn, xa = varg
    _step_cells(cu, cv, cw, cz, xu, xw, xz, xa,
                mu, beta, d_w, d_z, hx, hy, dt,
                &sw, &sz, &m_u, &m_w, &m_z)
    return un, wn, zn, varg


def step_bounds(u, v, z, double mu, double hx, double hy):
    """(max |dv/dn| over faces, max cell loss rate); see _fallback."""
    cdef double g, r
    cdef const double[:, ::1] cu = u, cv = v, cz = z
    _bounds(cu, cv, cz, mu, hx, hy, &g, &r)
    return g, r


cdef double _ksum(const double[:, ::1] a) noexcept nogil:
    """Kahan-compensated sum over all cells."""
    cdef Py_ssize_t ny = a.shape[0], nx = a.shape[1], i, j
    cdef double s = 0.0, c = 0.0, y, tt
    for j in range(ny):
        for i in range(nx):
            y = a[j, i] - c
            tt = s + y
            c = (tt - s) - y
            s = tt
    return s


def advance(u_arr, v_arr, w_arr, z_arr, double t, double t_target,
            double dt_cur, double mu, double beta, double d_w, double d_z,
            double hx, double hy, double dt_min, double safety,
            double cfl_diff, double positivity_guard, long max_steps,
            double vmax_prev):
    """Advance the state in place from t to t_target; see _fallback.advance."""
    cdef long steps = 0, rejects = 0, vviol = 0, floor_hits = 0
    cdef int status = STATUS_OK
    cdef double wz_rel_max = 0.0
    cdef double rem, gv_max, rate_max, adv_bound, rea_bound, dt_stable, dt_try
    cdef double sw_old, sz_old, sw_new, sz_new, lhs, rhs, denom, rel
    cdef double m_u, m_w, m_z, vmax_new
    cdef int finite_uwz, finite_v
    cdef double diff_bound = (cfl_diff * fmin(hx * hx, hy * hy)) / fmax(fmax(1.0, d_w), d_z)

    cur_u, cur_v, cur_w, cur_z = u_arr, v_arr, w_arr, z_arr
    nxt_u = np.empty_like(u_arr)
    nxt_v = np.empty_like(u_arr)
    nxt_w = np.empty_like(u_arr)
    nxt_z = np.empty_like(u_arr)
    varg = np.empty_like(u_arr)
    fbuf = np.empty_like(u_arr)

    cdef double[:, ::1] cu = cur_u, cv = cur_v, cw = cur_w, cz = cur_z
    cdef double[:, ::1] xu = nxt_u, xv = nxt_v, xw = nxt_w, xz = nxt_z
    cdef double[:, ::1] xa = varg
    cdef double[:, ::1] tmpv

    sw_old = _ksum(cw)
    sz_old = _ksum(cz)

    while True:
        rem = t_target - t
        if rem <= 0.0:
            break
        if steps + rejects >= max_steps:
            status = STATUS_STEP_BUDGET
            break
        _bounds(cu, cv, cz, mu, hx, hy, &gv_max, &rate_max)
        adv_bound = fmin(hx, hy) / gv_max if gv_max > 0.0 else INFINITY
        rea_bound = positivity_guard / rate_max
        dt_stable = safety * fmin(fmin(diff_bound, adv_bound), rea_bound)
        if dt_stable < dt_min:
            dt_stable = dt_min
            floor_hits += 1
        dt_try = fmin(fmin(dt_cur, dt_stable), rem)
        finite_uwz = _step_cells(cu, cv, cw, cz, xu, xw, xz, xa,
                                 mu, beta, d_w, d_z, hx, hy, dt_try,
                                 &sw_new, &sz_new, &m_u, &m_w, &m_z)
        # v <- v * min(exp(-dt (u+w)), 1): numpy's exp keeps the two
        # backends bitwise-aligned; the clamp makes max(v) nonincreasing
        # in floating point, not just in exact arithmetic.
        np.exp(varg, out=fbuf)
        np.minimum(fbuf, 1.0, out=fbuf)
        np.multiply(cur_v, fbuf, out=nxt_v)
        finite_v = _v_scan(xv, &vmax_new)
        if not (finite_uwz and finite_v and m_u > 0.0 and m_w >= 0.0 and m_z >= 0.0):
            rejects += 1
            dt_cur = 0.5 * dt_try
            if dt_cur < dt_min:
                status = STATUS_DT_UNDERFLOW
                break
            continue
        if vmax_new > vmax_prev:
            vviol += 1
        vmax_prev = vmax_new
        lhs = (sw_new + sz_new) - (sw_old + sz_old)
        rhs = dt_try * (-((1.0 - beta) * sw_old + sz_old))
        denom = sw_old + sz_old
        rel = fabs(lhs - rhs) / denom if denom > 0.0 else fabs(lhs - rhs)
        if rel > wz_rel_max:
            wz_rel_max = rel
        cur_u, nxt_u = nxt_u, cur_u
        cur_v, nxt_v = nxt_v, cur_v
        cur_w, nxt_w = nxt_w, cur_w
        cur_z, nxt_z = nxt_z, cur_z
        tmpv = cu
        cu = xu
        xu = tmpv
        tmpv = cv
        cv = xv
        xv = tmpv
        tmpv = cw
        cw = xw
        xw = tmpv
        tmpv = cz
        cz = xz
        xz = tmpv
        sw_old = sw_new
        sz_old = sz_new
        steps += 1
        if dt_try >= rem:
            t = t_target
            break
        t = t + dt_try
        dt_cur = fmin(dt_cur, dt_stable) * 1.2

    if cur_u is not u_arr:
        np.copyto(u_arr, cur_u)
        np.copyto(v_arr, cur_v)
        np.copyto(w_arr, cur_w)
        np.copyto(z_arr, cur_z)
    return (status, t, dt_cur, int(steps), int(rejects), int(vviol),
            vmax_prev, wz_rel_max, int(floor_hits))
