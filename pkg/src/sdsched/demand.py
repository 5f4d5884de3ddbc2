"""Data-driven process energy-demand models and their identification.

The demand splits into a steady part (piecewise-affine in the controlled
variable, anchored at tabulated steady operating points) and a dynamic
part driven by the reference-trajectory derivatives: either a static
linear form in the first two derivatives, or a first-order internal-state
model whose output mixes the state and the derivative.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import SdschedError


@dataclass(frozen=True)
class SteadyDemandPwa:
    """Two-segment interpolation through (value, demand) anchor points."""

    breakpoint: float
    Q_at_breakpoint: float
    m1: float  # slope left of the breakpoint
    m2: float  # slope right of the breakpoint
    lo: float
    hi: float

    def __call__(self, y):
        return steady_demand(y, self)


def steady_pwa_from_points(points) -> SteadyDemandPwa:
    """PWA through exactly three steady operating points (lo, mid, hi)."""
    pts = sorted(points)
    if len(pts) != 3:
        raise ValueError("need exactly three anchor points")
    (x0, q0), (x1, q1), (x2, q2) = pts
    return SteadyDemandPwa(
        breakpoint=x1,
        Q_at_breakpoint=q1,
        m1=(q1 - q0) / (x1 - x0),
        m2=(q2 - q1) / (x2 - x1),
        lo=x0,
        hi=x2,
    )


def steady_demand(y_cv, pwa: SteadyDemandPwa, extrapolate=False):
    """Steady demand at ``y_cv``; clamps (with a warning) outside the range.

    ``extrapolate=True`` instead continues the outer segments linearly,
    matching the affine form the scheduling model uses.
    """
    y = float(y_cv)
    if not extrapolate and (y < pwa.lo - 1e-12 or y > pwa.hi + 1e-12):
        warnings.warn(f"steady-demand evaluation at {y} clamped to [{pwa.lo}, {pwa.hi}]", stacklevel=2)
        y = min(max(y, pwa.lo), pwa.hi)
    slope = pwa.m1 if y <= pwa.breakpoint else pwa.m2
    return pwa.Q_at_breakpoint + slope * (y - pwa.breakpoint)


@dataclass(frozen=True)
class DynamicDemandLinear:
    """Static linear demand correction from the reference derivatives."""

    c1: float
    c2: float

    def __call__(self, d1, d2):
        return self.c1 * np.asarray(d1) + self.c2 * np.asarray(d2)


def fit_dynamic_linear(trajectories, pwa: SteadyDemandPwa) -> DynamicDemandLinear:
    """Least-squares (c1, c2) via the normal equations.

    ``trajectories`` are closed-loop runs; the regression target is the
    recorded demand minus the steady part evaluated on the reference
    trajectory, the regressors are the reference's first two derivatives.
    Samples from all runs are stacked with equal weight.
    """
    cols = []
    rhs = []
    for traj in trajectories:
        d1 = traj.w_fil_derivs[:, 0]
        d2 = traj.w_fil_derivs[:, 1]
        q = traj.outputs[:, 0]
        q_steady = np.array([steady_demand(w, pwa, extrapolate=True) for w in traj.w_fil])
        cols.append(np.column_stack([d1, d2]))
        rhs.append(q - q_steady)
    x_mat = np.vstack(cols)
    y_vec = np.concatenate(rhs)
    gram = x_mat.T @ x_mat
    cond = np.linalg.cond(gram)
    if not np.isfinite(cond) or cond > 1e12:
        raise SdschedError(f"rank-deficient demand regression (condition {cond:.3g})")
    c = np.linalg.solve(gram, x_mat.T @ y_vec)
    return DynamicDemandLinear(c1=float(c[0]), c2=float(c[1]))


@dataclass(frozen=True)
class DynamicDemandStateSpace:
    """First-order internal-state demand correction.

    dx/dt = a*x + b*u, output = c*x + d*u with u the reference derivative.
    Stable (a < 0) and at rest contributes nothing.
    """

    a: float
    b: float
    c: float
    d: float

    def simulate(self, u, dt, x0=0.0):
        """Output series for input series ``u`` sampled every ``dt``."""
        u = np.asarray(u, float)
        phi = math.exp(self.a * dt)
        gain = (phi - 1.0) / self.a
        x = np.empty(u.size)
        cur = x0
        for i in range(u.size):
            x[i] = cur
            cur = phi * cur + gain * self.b * u[i]
        return self.c * x + self.d * u


def _state_response(u, dt, a):
    """Internal-state series for unit input gain (b = 1)."""
    phi = math.exp(a * dt)
    gain = (phi - 1.0) / a
    x = np.empty(u.size)
    cur = 0.0
    for i in range(u.size):
        x[i] = cur
        cur = phi * cur + gain * u[i]
    return x


def fit_dynamic_statespace(trajectories, v_steady, a_grid=None) -> DynamicDemandStateSpace:
    """Fit (a, b, c, d) by scanning the pole and solving the rest linearly.

    Only the product b*c is identifiable, so c is normalized to 1.  For
    each candidate pole the internal-state response to the recorded
    reference derivative is simulated per run, and (b, d) follow from a
    least-squares fit of the demand residual; the pole with the smallest
    squared output error wins.  ``v_steady`` maps the reference value to
    the steady demand.
    """
    if a_grid is None:
        a_grid = np.arange(-1.0, -0.0099, 0.0025)
    runs = []
    for traj in trajectories:
        dt = float(traj.t[1] - traj.t[0])
        u = traj.w_fil_derivs[:, 0]
        target = traj.outputs[:, 0] - np.array([v_steady(w) for w in traj.w_fil])
        runs.append((u, dt, target))
    best = None
    for a in a_grid:
        xs = []
        us = []
        ys = []
        for u, dt, target in runs:
            xs.append(_state_response(u, dt, a))
            us.append(u)
            ys.append(target)
        x_mat = np.column_stack([np.concatenate(xs), np.concatenate(us)])
        y_vec = np.concatenate(ys)
        coef, res, rank, _ = np.linalg.lstsq(x_mat, y_vec, rcond=None)
        err = float(((x_mat @ coef - y_vec) ** 2).sum())
        if best is None or err < best[0]:
            best = (err, float(a), float(coef[0]), float(coef[1]))
    _, a, b, d = best
    if a >= 0:
        raise SdschedError("fitted demand pole is unstable")
    return DynamicDemandStateSpace(a=a, b=b, c=1.0, d=d)


def predict_demand(y_cv, derivatives, models, x_int=None):
    """Steady part plus dynamic correction.

    ``models`` is (steady PWA, dynamic model); the dynamic part is either
    the two-derivative linear form or the internal-state form (then
    ``x_int`` must be supplied along with the first derivative).
    """
    pwa, dyn = models
    base = steady_demand(y_cv, pwa)
    if isinstance(dyn, DynamicDemandLinear):
        d1, d2 = derivatives
        return base + dyn.c1 * d1 + dyn.c2 * d2
    if isinstance(dyn, DynamicDemandStateSpace):
        if x_int is None:
            raise ValueError("internal-state model needs x_int")
        d1 = derivatives[0] if np.ndim(derivatives) else derivatives
        return base + dyn.c * x_int + dyn.d * d1
    raise TypeError(f"unsupported dynamic model {type(dyn)!r}")
