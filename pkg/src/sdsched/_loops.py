"""Hot closed-loop simulation kernels (JIT-compiled unless disabled).

Both loops advance plant, set-point filter, and tracking controller on a
shared fixed step: the controller output is held over each step
(quasi-continuous control), the plant is integrated with RK4, and the
filter with its exact zero-order-hold discretization.  Integrators use
conditional anti-windup: the error is not accumulated while doing so
would push a saturated output further into its bound.
"""

import numpy as np

from ._accel import maybe_njit
from .plants.cstr import cstr_rhs_jit
from .plants.column import column_rhs_jit


def cstr_closed_loop_kernel(
    ca0,
    temp0,
    w0,
    wd0,
    integ0,
    w_sp_steps,
    n_sub,
    h,
    ad,
    bd,
    kp,
    tau_d,
    tau_i,
    bias,
    umin,
    umax,
    par,
):
    n_dis = w_sp_steps.shape[0]
    n = n_dis * n_sub
    ca = np.empty(n + 1)
    temp = np.empty(n + 1)
    w = np.empty(n + 1)
    wd = np.empty(n + 1)
    u = np.empty(n + 1)
    ca[0] = ca0
    temp[0] = temp0
    w[0] = w0
    wd[0] = wd0
    integ = integ0
    diverged_at = -1.0
    for i in range(n):
        w_sp = w_sp_steps[i // n_sub]
        c = ca[i]
        t = temp[i]
        dca0, _ = cstr_rhs_jit(c, t, 0.0, par)
        e = w[i] - c
        edot = wd[i] - dca0
        u_raw = kp * (e + tau_d * edot + integ / tau_i) + bias
        ui = u_raw
        if ui < umin:
            ui = umin
        elif ui > umax:
            ui = umax
        u[i] = ui
        # RK4 on the plant with the held output
        k1c, k1t = cstr_rhs_jit(c, t, ui, par)
        k2c, k2t = cstr_rhs_jit(c + 0.5 * h * k1c, t + 0.5 * h * k1t, ui, par)
        k3c, k3t = cstr_rhs_jit(c + 0.5 * h * k2c, t + 0.5 * h * k2t, ui, par)
        k4c, k4t = cstr_rhs_jit(c + h * k3c, t + h * k3t, ui, par)
        ca[i + 1] = c + (h / 6.0) * (k1c + 2.0 * k2c + 2.0 * k3c + k4c)
        temp[i + 1] = t + (h / 6.0) * (k1t + 2.0 * k2t + 2.0 * k3t + k4t)
        if not (np.isfinite(ca[i + 1]) and np.isfinite(temp[i + 1])):
            diverged_at = (i + 1) * h
            break
        # conditional anti-windup
        if (u_raw == ui) or (u_raw > umax and e < 0.0) or (u_raw < umin and e > 0.0):
            integ += e * h
        # exact filter step
        w[i + 1] = ad[0, 0] * w[i] + ad[0, 1] * wd[i] + bd[0] * w_sp
        wd[i + 1] = ad[1, 0] * w[i] + ad[1, 1] * wd[i] + bd[1] * w_sp
    u[n] = u[n - 1]
    return ca, temp, w, wd, u, integ, diverged_at


cstr_closed_loop_jit = maybe_njit(cstr_closed_loop_kernel)


def column_closed_loop_kernel(
    x0,
    M0,
    w0,
    iv0,
    il0,
    w_sp_steps,
    n_sub,
    h,
    a_fil,
    tau_fil,
    kpv,
    tiv,
    vbias,
    vmin,
    vmax,
    kpl,
    til,
    lbias,
    lmin,
    lmax,
    z_F,
    alpha,
    L_prof,
    M_k0,
    tau_k,
    feed_idx,
    F,
    d_lo,
    d_hi,
):
    n_dis = w_sp_steps.shape[0]
    n = n_dis * n_sub
    n_st = x0.shape[0]
    top = n_st - 1
    x = x0.copy()
    M = M0.copy()
    yd = np.empty(n + 1)
    xb = np.empty(n + 1)
    xd = np.empty(n + 1)
    w = np.empty(n + 1)
    wdot = np.empty(n + 1)
    V_tr = np.empty(n + 1)
    L_tr = np.empty(n + 1)
    D_tr = np.empty(n + 1)
    B_tr = np.empty(n + 1)
    iv = iv0
    il = il0
    wcur = w0
    x_lo = 1.0
    x_hi = 0.0
    diverged_at = -1.0
    for i in range(n):
        w_sp = w_sp_steps[i // n_sub]
        y_top = alpha * x[top - 1] / (1.0 + (alpha - 1.0) * x[top - 1])
        yd[i] = y_top
        xb[i] = x[0]
        xd[i] = x[top]
        w[i] = wcur
        wdot[i] = (w_sp - wcur) / tau_fil
        # controllers
        ev = (1.0 - wcur) - x[0]
        v_raw = kpv * (ev + iv / tiv) + vbias
        V = v_raw
        if V < vmin:
            V = vmin
        elif V > vmax:
            V = vmax
        el = wcur - y_top
        l_raw = kpl * (el + il / til) + lbias
        L = l_raw
        if L < lmin:
            L = lmin
        elif L > lmax:
            L = lmax
        # perfect level control: distillate balances reflux, bottoms the reboiler feed
        D = V - L
        if D < d_lo:
            D = d_lo
        elif D > d_hi:
            D = d_hi
        V_tr[i] = V
        L_tr[i] = L
        D_tr[i] = D
        L2 = L_prof[1] + (M[1] - M_k0) / tau_k
        if L2 < 0.0:
            L2 = 0.0
        Bf = L2 - V
        if Bf < d_lo:
            Bf = d_lo
        elif Bf > d_hi:
            Bf = d_hi
        B_tr[i] = Bf
        # RK4 (bottoms recomputed per stage from the current hold-up)
        k1x, k1m = _column_stage_rhs(x, M, L, V, D, z_F, alpha, L_prof, M_k0, tau_k, feed_idx, F, d_lo, d_hi)
        x2 = x + 0.5 * h * k1x
        m2 = M + 0.5 * h * k1m
        k2x, k2m = _column_stage_rhs(x2, m2, L, V, D, z_F, alpha, L_prof, M_k0, tau_k, feed_idx, F, d_lo, d_hi)
        x3 = x + 0.5 * h * k2x
        m3 = M + 0.5 * h * k2m
        k3x, k3m = _column_stage_rhs(x3, m3, L, V, D, z_F, alpha, L_prof, M_k0, tau_k, feed_idx, F, d_lo, d_hi)
        x4 = x + h * k3x
        m4 = M + h * k3m
        k4x, k4m = _column_stage_rhs(x4, m4, L, V, D, z_F, alpha, L_prof, M_k0, tau_k, feed_idx, F, d_lo, d_hi)
        x = x + (h / 6.0) * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        M = M + (h / 6.0) * (k1m + 2.0 * k2m + 2.0 * k3m + k4m)
        ok = True
        for k in range(n_st):
            if not (np.isfinite(x[k]) and np.isfinite(M[k])):
                ok = False
            if x[k] < x_lo:
                x_lo = x[k]
            if x[k] > x_hi:
                x_hi = x[k]
        if not ok:
            diverged_at = (i + 1) * h
            break
        # anti-windup on both loops (error weighted by gain sign)
        kev = kpv * ev
        kel = kpl * el
        if (v_raw == V) or (v_raw > vmax and kev <= 0.0) or (v_raw < vmin and kev >= 0.0):
            iv += ev * h
        if (l_raw == L) or (l_raw > lmax and kel <= 0.0) or (l_raw < lmin and kel >= 0.0):
            il += el * h
        # exact first-order filter step
        wcur = w_sp + (wcur - w_sp) * a_fil
    y_top = alpha * x[top - 1] / (1.0 + (alpha - 1.0) * x[top - 1])
    yd[n] = y_top
    xb[n] = x[0]
    xd[n] = x[top]
    w[n] = wcur
    wdot[n] = (w_sp_steps[n_dis - 1] - wcur) / tau_fil
    V_tr[n] = V_tr[n - 1]
    L_tr[n] = L_tr[n - 1]
    D_tr[n] = D_tr[n - 1]
    B_tr[n] = B_tr[n - 1]
    return yd, xb, xd, w, V_tr, L_tr, D_tr, B_tr, x, M, iv, il, x_lo, x_hi, diverged_at


def _column_stage_rhs_py(x, M, L_reflux, V, D, z_F, alpha, L_prof, M_k0, tau_k, feed_idx, F, b_lo, b_hi):
    """Column derivatives with the bottoms flow set to hold the reboiler level."""
    L2 = L_prof[1] + (M[1] - M_k0) / tau_k
    if L2 < 0.0:
        L2 = 0.0
    B = L2 - V
    if B < b_lo:
        B = b_lo
    elif B > b_hi:
        B = b_hi
    return column_rhs_jit(x, M, L_reflux, V, D, B, F, z_F, alpha, L_prof, M_k0, tau_k, feed_idx)


_column_stage_rhs = maybe_njit(_column_stage_rhs_py)

column_closed_loop_jit = maybe_njit(column_closed_loop_kernel)
