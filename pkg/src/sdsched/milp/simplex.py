"""Dense bounded-variable simplex: two-phase primal plus a dual variant.

The tableau form keeps the full matrix B^{-1}A in memory, which is
adequate at this package's scale (a few thousand rows).  Variables carry
individual bounds; nonbasic variables rest at a bound or, for free
variables, at zero.  Numerical safeguards: rows are equilibrated, the
ratio tests are two-pass (a relaxed first pass bounds the step, the
second picks the largest pivot within it), reduced costs are refreshed
periodically, and the driver refactorizes from the basis and re-runs
whenever the final row residuals drift.  Anti-cycling: after a run of
non-improving steps the pivot selection falls back to Bland's rule.

Column layout of the working arrays: the model's structural variables,
then one slack per row, then one artificial per row (artificials are
frozen at zero outside phase 1 but keep the column space constant so any
basis can be re-assembled for warm starts).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._accel import maybe_njit
from ..errors import SolverError

INF = math.inf

# status codes shared by the kernels
OPTIMAL = 0
UNBOUNDED = 1
ITER_LIMIT = 2
STALLED = 3
DUAL_INFEASIBLE = 4  # dual simplex proved primal infeasibility

_BLOCK_EPS = 1e-11  # smallest tableau entry that still blocks a step
_D_EPS = 1e-9
_FEAS_RELAX = 1e-9  # Harris pass-1 bound relaxation
_RESIDUAL_TOL = 1e-8


def _primal_kernel(T, xb, basis, vstat, lb, ub, d, max_iter, bland_after, refresh, cost):
    m, n = T.shape
    no_progress = 0
    bland = False
    it = 0
    while it < max_iter:
        it += 1
        # entering variable
        e = -1
        sig = 1.0
        if bland:
            for j in range(n):
                s = vstat[j]
                if s == 3 or (s != 2 and ub[j] <= lb[j]):
                    continue
                if s == 0 and d[j] < -_D_EPS:
                    e = j
                    sig = 1.0
                    break
                if s == 1 and d[j] > _D_EPS:
                    e = j
                    sig = -1.0
                    break
                if s == 2 and (d[j] < -_D_EPS or d[j] > _D_EPS):
                    e = j
                    sig = 1.0 if d[j] < 0.0 else -1.0
                    break
        else:
            best = _D_EPS
            for j in range(n):
                s = vstat[j]
                if s == 3:
                    continue
                if s != 2 and ub[j] <= lb[j]:
                    continue
                dj = d[j]
                if s == 0:
                    if -dj > best:
                        best = -dj
                        e = j
                        sig = 1.0
                elif s == 1:
                    if dj > best:
                        best = dj
                        e = j
                        sig = -1.0
                else:
                    adj = dj if dj > 0.0 else -dj
                    if adj > best:
                        best = adj
                        e = j
                        sig = 1.0 if dj < 0.0 else -1.0
        if e < 0:
            return OPTIMAL, it

        if vstat[e] == 2:
            flip_range = INF
        else:
            flip_range = ub[e] - lb[e]

        # ratio test, pass 1: relaxed bounds cap the step length
        t_limit = flip_range
        for i in range(m):
            a = T[i, e]
            if a < _BLOCK_EPS and a > -_BLOCK_EPS:
                continue
            delta = -sig * a
            bi = basis[i]
            if delta > 0.0:
                ubi = ub[bi]
                if ubi < INF:
                    ti = (ubi + _FEAS_RELAX - xb[i]) / delta
                    if ti < t_limit:
                        t_limit = ti
            else:
                lbi = lb[bi]
                if lbi > -INF:
                    ti = (lbi - _FEAS_RELAX - xb[i]) / delta
                    if ti < t_limit:
                        t_limit = ti
        if t_limit == INF:
            return UNBOUNDED, it
        if t_limit < 0.0:
            t_limit = 0.0

        # pass 2: among rows blocking within the cap, take the biggest pivot
        leave = -1
        leave_up = False
        t_leave = 0.0
        best_mag = 0.0
        for i in range(m):
            a = T[i, e]
            mag = a if a > 0.0 else -a
            if mag < _BLOCK_EPS:
                continue
            delta = -sig * a
            bi = basis[i]
            if delta > 0.0:
                ubi = ub[bi]
                if ubi < INF:
                    ti = (ubi - xb[i]) / delta
                    if ti < 0.0:
                        ti = 0.0
                    if ti <= t_limit:
                        take = False
                        if bland:
                            take = leave < 0 or bi < basis[leave]
                        else:
                            take = mag > best_mag
                        if take:
                            leave = i
                            leave_up = True
                            t_leave = ti
                            best_mag = mag
            else:
                lbi = lb[bi]
                if lbi > -INF:
                    ti = (lbi - xb[i]) / delta
                    if ti < 0.0:
                        ti = 0.0
                    if ti <= t_limit:
                        take = False
                        if bland:
                            take = leave < 0 or bi < basis[leave]
                        else:
                            take = mag > best_mag
                        if take:
                            leave = i
                            leave_up = False
                            t_leave = ti
                            best_mag = mag

        if leave < 0 or (flip_range < t_leave and flip_range <= t_limit):
            # bound flip: entering crosses its whole range without a pivot
            t = flip_range
            if t > 0.0:
                for i in range(m):
                    xb[i] -= sig * t * T[i, e]
            vstat[e] = 1 - vstat[e]
        else:
            t = t_leave
            r = leave
            if vstat[e] == 0:
                enter_val = lb[e] + sig * t
            elif vstat[e] == 1:
                enter_val = ub[e] + sig * t
            else:
                enter_val = sig * t
            for i in range(m):
                xb[i] -= sig * t * T[i, e]
            lv = basis[r]
            vstat[lv] = 1 if leave_up else 0
            piv = T[r, e]
            inv = 1.0 / piv
            for j in range(n):
                T[r, j] *= inv
            for i in range(m):
                if i != r:
                    f = T[i, e]
                    if f != 0.0:
                        for j in range(n):
                            T[i, j] -= f * T[r, j]
                        T[i, e] = 0.0
            de = d[e]
            if de != 0.0:
                for j in range(n):
                    d[j] -= de * T[r, j]
            d[e] = 0.0
            basis[r] = e
            vstat[e] = 3
            xb[r] = enter_val

        if t > 1e-12:
            no_progress = 0
            bland = False
        else:
            no_progress += 1
            if no_progress > bland_after:
                bland = True

        if it % refresh == 0:
            for j in range(n):
                d[j] = cost[j]
            for i in range(m):
                cb = cost[basis[i]]
                if cb != 0.0:
                    for j in range(n):
                        d[j] -= cb * T[i, j]
            for i in range(m):
                d[basis[i]] = 0.0
    return ITER_LIMIT, max_iter


def _dual_kernel(T, xb, basis, vstat, lb, ub, d, max_iter):
    m, n = T.shape
    it = 0
    while it < max_iter:
        it += 1
        r = -1
        worst = 1e-9
        below = True
        for i in range(m):
            bi = basis[i]
            v = lb[bi] - xb[i]
            if v > worst:
                worst = v
                r = i
                below = True
            v = xb[i] - ub[bi]
            if v > worst:
                worst = v
                r = i
                below = False
        if r < 0:
            return OPTIMAL, it

        # entering: two-pass ratio test on the reduced costs
        limit = INF
        for j in range(n):
            s = vstat[j]
            if s == 3 or (s != 2 and ub[j] <= lb[j]):
                continue
            a = T[r, j]
            mag = a if a > 0.0 else -a
            if mag < _BLOCK_EPS:
                continue
            if s == 0:
                ok = (a < 0.0) if below else (a > 0.0)
            elif s == 1:
                ok = (a > 0.0) if below else (a < 0.0)
            else:
                ok = True
            if not ok:
                continue
            dj = d[j]
            if dj < 0.0:
                dj = -dj
            ratio = (dj + _D_EPS) / mag
            if ratio < limit:
                limit = ratio
        if limit == INF:
            return DUAL_INFEASIBLE, it

        e = -1
        best_mag = 0.0
        for j in range(n):
            s = vstat[j]
            if s == 3 or (s != 2 and ub[j] <= lb[j]):
                continue
            a = T[r, j]
            mag = a if a > 0.0 else -a
            if mag < _BLOCK_EPS:
                continue
            if s == 0:
                ok = (a < 0.0) if below else (a > 0.0)
            elif s == 1:
                ok = (a > 0.0) if below else (a < 0.0)
            else:
                ok = True
            if not ok:
                continue
            dj = d[j]
            if dj < 0.0:
                dj = -dj
            if dj / mag <= limit and mag > best_mag:
                best_mag = mag
                e = j
        if e < 0:
            return DUAL_INFEASIBLE, it

        target = lb[basis[r]] if below else ub[basis[r]]
        a_re = T[r, e]
        step = (xb[r] - target) / a_re
        for i in range(m):
            xb[i] -= step * T[i, e]
        if vstat[e] == 0:
            enter_val = lb[e] + step
        elif vstat[e] == 1:
            enter_val = ub[e] + step
        else:
            enter_val = step
        lv = basis[r]
        vstat[lv] = 0 if below else 1
        inv = 1.0 / a_re
        for j in range(n):
            T[r, j] *= inv
        for i in range(m):
            if i != r:
                f = T[i, e]
                if f != 0.0:
                    for j in range(n):
                        T[i, j] -= f * T[r, j]
                    T[i, e] = 0.0
        de = d[e]
        if de != 0.0:
            for j in range(n):
                d[j] -= de * T[r, j]
        d[e] = 0.0
        basis[r] = e
        vstat[e] = 3
        xb[r] = enter_val
    return ITER_LIMIT, max_iter


primal_kernel = maybe_njit(_primal_kernel)
dual_kernel = maybe_njit(_dual_kernel)


@dataclass
class StandardForm:
    """Equality standard form with slacks, row equilibration, rhs."""

    a: np.ndarray  # (m, n_struct + m) structural + slack columns
    b: np.ndarray
    slack_lb: np.ndarray
    slack_ub: np.ndarray
    n_struct: int
    row_names: list

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def n_real(self) -> int:
        return self.a.shape[1]

    @property
    def n_cols(self) -> int:
        """Total column count including artificials."""
        return self.a.shape[1] + self.m


def build_standard_form(model, skip_rows=()) -> StandardForm:
    """Dense standard form of the model's rows (bounds live separately).

    Rows are scaled by their largest absolute coefficient so that big-M
    constraints do not dominate the pivot tolerances.
    """
    skip = set(skip_rows)
    rows = [r for i, r in enumerate(model.constraints) if i not in skip]
    m = len(rows)
    n0 = model.n_vars
    a = np.zeros((m, n0 + m))
    b = np.zeros(m)
    slack_lb = np.zeros(m)
    slack_ub = np.zeros(m)
    names = []
    for i, row in enumerate(rows):
        scale = max((abs(c) for _, c in row.coeffs), default=0.0)
        if scale == 0.0:
            scale = 1.0
        inv = 1.0 / scale
        for j, c in row.coeffs:
            a[i, j] = c * inv
        b[i] = row.rhs * inv
        a[i, n0 + i] = 1.0
        if row.sense == "<=":
            slack_lb[i], slack_ub[i] = 0.0, INF
        elif row.sense == ">=":
            slack_lb[i], slack_ub[i] = -INF, 0.0
        else:
            slack_lb[i], slack_ub[i] = 0.0, 0.0
        names.append(row.name)
    return StandardForm(a=a, b=b, slack_lb=slack_lb, slack_ub=slack_ub, n_struct=n0, row_names=names)


@dataclass
class LpState:
    """Final simplex state: enough to warm start or extract the solution."""

    status: int
    x: np.ndarray  # structural variable values
    objective: float
    basis: np.ndarray
    vstat: np.ndarray
    iterations: int
    tableau: np.ndarray | None = None
    xb: np.ndarray | None = None
    d: np.ndarray | None = None
    lb_full: np.ndarray | None = None
    ub_full: np.ndarray | None = None
    art_sign: np.ndarray | None = None


def _full_bounds(sf: StandardForm, lb_struct, ub_struct):
    m = sf.m
    lb = np.concatenate([lb_struct, sf.slack_lb, np.zeros(m)])
    ub = np.concatenate([ub_struct, sf.slack_ub, np.zeros(m)])
    return lb, ub


def _initial_status(lb, ub, n_real):
    vstat = np.empty(n_real, dtype=np.int8)
    for j in range(n_real):
        lj, uj = lb[j], ub[j]
        if lj > -INF and (uj == INF or abs(lj) <= abs(uj)):
            vstat[j] = 0
        elif uj < INF:
            vstat[j] = 1
        else:
            vstat[j] = 2
    return vstat


def _nonbasic_values(vstat, lb, ub):
    vals = np.where(vstat == 0, lb, np.where(vstat == 1, ub, 0.0))
    return np.where(np.isfinite(vals), vals, 0.0)


def _assemble_ext(sf: StandardForm, art_sign) -> np.ndarray:
    a_ext = np.zeros((sf.m, sf.n_cols))
    a_ext[:, : sf.n_real] = sf.a
    for i in range(sf.m):
        if art_sign[i] != 0.0:
            a_ext[i, sf.n_real + i] = art_sign[i]
    return a_ext


def _rebuild_state(sf: StandardForm, art_sign, basis, vstat, lb, ub, cost_full):
    """Tableau, basic values and reduced costs for a given basis.

    Returns None when the basis matrix is singular.
    """
    a_ext = _assemble_ext(sf, art_sign)
    bmat = a_ext[:, basis]
    try:
        binv = np.linalg.inv(bmat)
    except np.linalg.LinAlgError:
        return None
    T = binv @ a_ext
    x_nb = _nonbasic_values(vstat, lb, ub)
    x_nb[basis] = 0.0
    xb = binv @ (sf.b - a_ext @ x_nb)
    d = cost_full - cost_full[basis] @ T
    d[basis] = 0.0
    return T, xb, d


def _residual(sf: StandardForm, art_sign, x_full) -> float:
    res = sf.a @ x_full[: sf.n_real] - sf.b
    for i in range(sf.m):
        if art_sign[i] != 0.0:
            res[i] += art_sign[i] * x_full[sf.n_real + i]
    return float(np.abs(res).max()) if res.size else 0.0


def _extract(sf, cost_full, obj_const, T, xb, basis, vstat, lb, ub, status, iters, d, art_sign) -> LpState:
    x_full = _nonbasic_values(vstat, lb, ub)
    x_full[basis] = xb
    obj = obj_const + float(cost_full @ x_full)
    return LpState(
        status=status,
        x=x_full[: sf.n_struct].copy(),
        objective=obj,
        basis=basis.copy(),
        vstat=vstat.copy(),
        iterations=iters,
        tableau=T,
        xb=xb,
        d=d,
        lb_full=lb,
        ub_full=ub,
        art_sign=art_sign,
    )


_CHUNK = 150  # pivots between refactorizations


def _run_primal(sf, art_sign, cost_full, T, xb, basis, vstat, lb, ub, max_iter, bland_after=100):
    """Primal iterations with periodic refactorization from the basis.

    Rank-one tableau updates accumulate roundoff on ill-conditioned chains
    (collocation continuity), so the tableau and basic values are rebuilt
    exactly every few hundred pivots and once more at optimality when the
    row residuals drifted.
    """
    iters = 0
    while True:
        d = _reduced(cost_full, basis, T)
        budget = min(_CHUNK, max_iter - iters)
        if budget <= 0:
            return ITER_LIMIT, iters, T, xb
        st, n_it = primal_kernel(T, xb, basis, vstat, lb, ub, d, budget, bland_after, 10**9, cost_full)
        iters += n_it
        refresh = st == ITER_LIMIT
        if st == OPTIMAL:
            x_full = _nonbasic_values(vstat, lb, ub)
            x_full[basis] = xb
            refresh = _residual(sf, art_sign, x_full) > _RESIDUAL_TOL
            if not refresh:
                return OPTIMAL, iters, T, xb
        elif st != ITER_LIMIT:
            return st, iters, T, xb
        rebuilt = _rebuild_state(sf, art_sign, basis, vstat, lb, ub, cost_full)
        if rebuilt is None:
            return STALLED, iters, T, xb
        T, xb, _ = rebuilt


def _run_dual(sf, art_sign, cost_full, T, xb, basis, vstat, lb, ub, max_iter):
    """Dual iterations with the same chunked refactorization scheme."""
    iters = 0
    while True:
        d = _reduced(cost_full, basis, T)
        budget = min(_CHUNK, max_iter - iters)
        if budget <= 0:
            return ITER_LIMIT, iters, T, xb
        st, n_it = dual_kernel(T, xb, basis, vstat, lb, ub, d, budget)
        iters += n_it
        refresh = st == ITER_LIMIT
        if st == OPTIMAL:
            x_full = _nonbasic_values(vstat, lb, ub)
            x_full[basis] = xb
            refresh = _residual(sf, art_sign, x_full) > _RESIDUAL_TOL
            if not refresh:
                return OPTIMAL, iters, T, xb
        elif st != ITER_LIMIT:
            return st, iters, T, xb
        rebuilt = _rebuild_state(sf, art_sign, basis, vstat, lb, ub, cost_full)
        if rebuilt is None:
            return STALLED, iters, T, xb
        T, xb, _ = rebuilt


def solve_lp_scratch(sf: StandardForm, cost_struct, obj_const, lb_struct, ub_struct, max_iter=None, _bland_after=100) -> LpState:
    """Two-phase primal simplex from the all-slack/artificial basis."""
    m = sf.m
    n_real = sf.n_real
    n_tot = sf.n_cols
    lb, ub = _full_bounds(sf, lb_struct, ub_struct)
    cost_full = np.concatenate([np.asarray(cost_struct, float), np.zeros(n_tot - sf.n_struct)])
    if max_iter is None:
        max_iter = 50 * (m + n_tot) + 10000

    vstat = np.empty(n_tot, dtype=np.int8)
    vstat[:n_real] = _initial_status(lb, ub, n_real)
    vstat[n_real:] = 0
    x_nb = _nonbasic_values(vstat[:n_real], lb[:n_real], ub[:n_real])
    resid = sf.b - sf.a @ x_nb

    basis = np.empty(m, dtype=np.int64)
    art_sign = np.zeros(m)
    need_phase1 = False
    for i in range(m):
        s_idx = sf.n_struct + i
        r = resid[i] + x_nb[s_idx]
        if sf.slack_lb[i] - 1e-11 <= r <= sf.slack_ub[i] + 1e-11:
            basis[i] = s_idx
            vstat[s_idx] = 3
        else:
            clamp = min(max(r, sf.slack_lb[i]), sf.slack_ub[i])
            vstat[s_idx] = 0 if clamp == sf.slack_lb[i] else 1
            rho = r - clamp
            basis[i] = n_real + i
            art_sign[i] = 1.0 if rho > 0.0 else -1.0
            vstat[n_real + i] = 3
            need_phase1 = True

    T = np.zeros((m, n_tot))
    T[:, :n_real] = sf.a
    for i in range(m):
        if art_sign[i] != 0.0:
            T[i, n_real + i] = art_sign[i]
        if art_sign[i] < 0.0:
            T[i, :] *= -1.0
    x_nb_full = _nonbasic_values(vstat, lb, ub)
    x_nb_full[basis] = 0.0
    sgn = np.where(art_sign < 0.0, -1.0, 1.0)
    xb = sgn * sf.b - T @ x_nb_full

    iters = 0
    if need_phase1:
        ub_p1 = ub.copy()
        ub_p1[n_real:] = np.where(art_sign != 0.0, INF, 0.0)
        cost1 = np.zeros(n_tot)
        cost1[n_real:] = np.where(art_sign != 0.0, 1.0, 0.0)
        st, n1, T, xb = _run_primal(sf, art_sign, cost1, T, xb, basis, vstat, lb, ub_p1, max_iter, _bland_after)
        iters += n1
        if st in (ITER_LIMIT, STALLED):
            if _bland_after > 0:
                # conservative restart: Bland's rule from the first pivot
                return solve_lp_scratch(sf, cost_struct, obj_const, lb_struct, ub_struct, max_iter, _bland_after=0)
            raise SolverError(f"phase-1 simplex stalled after {iters} pivots")
        art_total = sum(abs(xb[i]) for i in range(m) if basis[i] >= n_real)
        if art_total > 1e-7:
            return _extract(sf, cost_full, obj_const, T, xb, basis, vstat, lb, ub, DUAL_INFEASIBLE, iters, None, art_sign)
        for i in range(m):
            if basis[i] >= n_real:
                row = T[i, :]
                pivot_j = -1
                best = 1e-7
                for j in range(n_real):
                    if vstat[j] != 3 and abs(row[j]) > best:
                        best = abs(row[j])
                        pivot_j = j
                if pivot_j >= 0:
                    _pivot_inplace(T, xb, basis, vstat, i, pivot_j)
        ub[n_real:] = 0.0

    st, n2, T, xb = _run_primal(sf, art_sign, cost_full, T, xb, basis, vstat, lb, ub, max_iter, _bland_after)
    iters += n2
    if st in (ITER_LIMIT, STALLED):
        if _bland_after > 0:
            return solve_lp_scratch(sf, cost_struct, obj_const, lb_struct, ub_struct, max_iter, _bland_after=0)
        raise SolverError(f"phase-2 simplex stalled after {iters} pivots")
    d = _reduced(cost_full, basis, T)
    return _extract(sf, cost_full, obj_const, T, xb, basis, vstat, lb, ub, st, iters, d, art_sign)


def _pivot_inplace(T, xb, basis, vstat, r, e):
    """Degenerate basis swap used to drive artificials out after phase 1."""
    piv = T[r, e]
    T[r, :] /= piv
    for i in range(T.shape[0]):
        if i != r:
            f = T[i, e]
            if f != 0.0:
                T[i, :] -= f * T[r, :]
                T[i, e] = 0.0
    lv = basis[r]
    val = xb[r]
    vstat[lv] = 0
    basis[r] = e
    vstat[e] = 3
    xb[r] = val


def _finish_dual(sf, art_sign, cost_full, obj_const, T, xb, basis, vstat, lb, ub, max_iter, iters):
    st, n_it, T, xb = _run_dual(sf, art_sign, cost_full, T, xb, basis, vstat, lb, ub, max_iter)
    iters += n_it
    if st in (ITER_LIMIT, STALLED):
        return LpState(status=STALLED, x=np.empty(0), objective=math.nan, basis=basis, vstat=vstat, iterations=iters)
    d = _reduced(cost_full, basis, T)
    return _extract(sf, cost_full, obj_const, T, xb, basis, vstat, lb, ub, st, iters, d, art_sign)


def _reduced(cost_full, basis, T):
    d = cost_full - cost_full[basis] @ T
    d[basis] = 0.0
    return d


def resolve_dual_from_basis(sf: StandardForm, cost_struct, obj_const, lb_struct, ub_struct, basis, vstat, art_sign=None, max_iter=None) -> LpState:
    """Re-assemble the tableau for a stored basis and repair with dual simplex.

    Intended for bound-only changes against an optimal parent basis (the
    reduced costs stay dual feasible).  Returns a STALLED state when the
    basis matrix is singular; callers fall back to a scratch solve.
    """
    m = sf.m
    lb, ub = _full_bounds(sf, lb_struct, ub_struct)
    cost_full = np.concatenate([np.asarray(cost_struct, float), np.zeros(sf.n_cols - sf.n_struct)])
    if max_iter is None:
        max_iter = 50 * (m + sf.n_cols) + 10000
    if art_sign is None:
        art_sign = np.zeros(m)
        for i in range(m):
            if basis[i] >= sf.n_real:
                art_sign[i] = 1.0
    rebuilt = _rebuild_state(sf, art_sign, basis, vstat, lb, ub, cost_full)
    if rebuilt is None:
        return LpState(status=STALLED, x=np.empty(0), objective=math.nan, basis=basis, vstat=vstat, iterations=0)
    T, xb, _ = rebuilt
    return _finish_dual(sf, art_sign, cost_full, obj_const, T, xb, basis.copy(), vstat.copy(), lb, ub, max_iter, 0)


def redual_from_tableau(sf: StandardForm, cost_struct, obj_const, state: LpState, lb_struct, ub_struct, max_iter=None) -> LpState:
    """Dual-simplex repair starting from a cached optimal tableau.

    ``state`` must hold the tableau solved under the parent bounds; only
    variable bounds may differ.  The cached arrays are copied first.
    """
    m = sf.m
    lb, ub = _full_bounds(sf, lb_struct, ub_struct)
    cost_full = np.concatenate([np.asarray(cost_struct, float), np.zeros(sf.n_cols - sf.n_struct)])
    if max_iter is None:
        max_iter = 50 * (m + sf.n_cols) + 10000
    T = state.tableau.copy()
    xb = state.xb.copy()
    basis = state.basis.copy()
    vstat = state.vstat.copy()
    art_sign = state.art_sign if state.art_sign is not None else np.zeros(m)
    # nonbasic variables whose bound moved drag the basic values with them
    old_vals = _nonbasic_values(vstat, state.lb_full, state.ub_full)
    new_vals = _nonbasic_values(vstat, lb, ub)
    for j in np.nonzero(np.abs(new_vals - old_vals) > 0.0)[0]:
        if vstat[j] == 3:
            continue
        xb -= (new_vals[j] - old_vals[j]) * T[:, j]
    return _finish_dual(sf, art_sign, cost_full, obj_const, T, xb, basis, vstat, lb, ub, max_iter, 0)
