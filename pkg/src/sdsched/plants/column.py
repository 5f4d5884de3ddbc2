"""Binary distillation column with constant relative volatility.

Stage numbering runs bottom-up: stage 0 is the reboiler, stage ``N_F-1``
(0-based) the feed stage, stage ``N`` the total condenser, for ``N+1``
stages in total.  Each stage carries a liquid mole fraction and a liquid
hold-up; vapor flow is constant along the column (no vapor hold-up) and
tray liquid flows follow a linearized hydraulic law with a short lag.
Flows are normalized to the feed flow, time is in minutes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .._accel import maybe_njit
from ..errors import SteadyStateError


@dataclass(frozen=True)
class ColumnParams:
    """Column geometry, thermodynamics and input bounds.

    ``input_bounds`` maps flow name to (lower, upper) in feed-flow units.
    The heat scale (kW per unit boilup) is derived from the nominal
    operating point; use :func:`nominal_point` to obtain it.
    """

    z_F: float = 0.5
    alpha: float = 1.5
    N: int = 40
    N_F: int = 21
    M_k0_over_F: float = 0.5
    tau_k: float = 0.063
    F: float = 1.0
    rho_nom: float = 0.9
    input_bounds: tuple = (("D", 0.0, 1.0), ("B", 0.0, 1.0), ("V", 1.5, 2.5), ("L", 1.0, 2.0))

    def __post_init__(self):
        if self.alpha <= 1.0:
            raise ValueError("relative volatility must exceed 1")
        if not 1 < self.N_F < self.N + 1:
            raise ValueError("feed stage must be strictly inside the column")
        if not 0.0 < self.z_F < 1.0:
            raise ValueError("feed mole fraction must lie in (0, 1)")

    @property
    def n_stages(self) -> int:
        return self.N + 1

    @property
    def feed_index(self) -> int:
        """0-based feed stage index."""
        return self.N_F - 1

    @property
    def M_k0(self) -> float:
        return self.M_k0_over_F * self.F

    def bound(self, name: str):
        """(lower, upper) bound of an input flow in absolute units."""
        for nm, lo, hi in self.input_bounds:
            if nm == name:
                return lo * self.F, hi * self.F
        raise KeyError(name)


@dataclass
class ColumnState:
    """Liquid mole fractions and hold-ups, one entry per stage."""

    x: np.ndarray
    M: np.ndarray

    def copy(self) -> "ColumnState":
        return ColumnState(self.x.copy(), self.M.copy())


@dataclass
class ColumnInputs:
    L: float
    V: float
    D: float
    B: float
    F: float = 1.0


def vapor_fraction(x_k, alpha):
    """Equilibrium vapor mole fraction for liquid composition ``x_k``."""
    x_k = np.asarray(x_k, dtype=float)
    y = alpha * x_k / (1.0 + (alpha - 1.0) * x_k)
    return float(y) if y.ndim == 0 else y


def nominal_liquid_profile(p: ColumnParams, L_nom: float) -> np.ndarray:
    """Per-stage nominal liquid flows for the hydraulic law.

    Stages at and below the feed carry the reflux plus the (liquid) feed;
    entries for reboiler and condenser are placeholders (their outflows are
    the manipulated B and L).
    """
    prof = np.empty(p.n_stages)
    prof[: p.feed_index + 1] = L_nom + p.F
    prof[p.feed_index + 1 :] = L_nom
    return prof


def column_rhs_kernel(x, M, L_reflux, V, D, B, F, z_F, alpha, L_prof, M_k0, tau_k, feed_idx):
    """Stage-wise derivatives (dx/dt, dM/dt); tray flows from the hydraulic law."""
    n = x.shape[0]
    top = n - 1
    y = alpha * x / (1.0 + (alpha - 1.0) * x)
    # liquid leaving each stage downward; trays cannot flow backward
    L = np.empty(n)
    L[0] = B
    L[top] = L_reflux
    for k in range(1, top):
        flow = L_prof[k] + (M[k] - M_k0) / tau_k
        L[k] = flow if flow > 0.0 else 0.0

    dx = np.empty(n)
    dM = np.empty(n)
    dx[0] = (L[1] * x[1] - V * y[0] - B * x[0]) / M[0]
    dM[0] = L[1] - V - B
    for k in range(1, top):
        flux = L[k + 1] * x[k + 1] + V * y[k - 1] - L[k] * x[k] - V * y[k]
        dMk = L[k + 1] - L[k]
        if k == feed_idx:
            flux += F * z_F
            dMk += F
        dx[k] = flux / M[k]
        dM[k] = dMk
    dx[top] = (V * y[top - 1] - L_reflux * x[top] - D * x[top]) / M[top]
    dM[top] = V - L_reflux - D
    return dx, dM


column_rhs_jit = maybe_njit(column_rhs_kernel)


def column_rhs(state: ColumnState, u: ColumnInputs, p: ColumnParams, L_prof=None):
    """Derivatives of a :class:`ColumnState` under inputs ``u``.

    ``L_prof`` defaults to the nominal-point hydraulic reference profile.
    """
    if L_prof is None:
        L_prof = nominal_liquid_profile(p, nominal_point(p).L)
    dx, dM = column_rhs_kernel(
        np.asarray(state.x, float),
        np.asarray(state.M, float),
        u.L,
        u.V,
        u.D,
        u.B,
        u.F,
        p.z_F,
        p.alpha,
        L_prof,
        p.M_k0,
        p.tau_k,
        p.feed_index,
    )
    if not (np.all(np.isfinite(dx)) and np.all(np.isfinite(dM))):
        raise FloatingPointError("non-finite column derivative; check hold-ups")
    return dx, dM


def _steady_residual(xv, rho, p: ColumnParams):
    """Residuals of the steady composition balances plus the purity spec.

    Unknowns ``xv`` = stage compositions followed by boilup V; distillate
    and bottoms are fixed at F/2 each, reflux L = V - F/2.
    """
    n = p.n_stages
    x = xv[:n]
    V = xv[n]
    F = p.F
    D = B = 0.5 * F
    L_top = V - D
    y = p.alpha * x / (1.0 + (p.alpha - 1.0) * x)
    fi = p.feed_index
    L = np.empty(n)
    L[0] = B
    L[1 : fi + 1] = L_top + F
    L[fi + 1 :] = L_top
    r = np.empty(n + 1)
    r[0] = L[1] * x[1] - V * y[0] - B * x[0]
    for k in range(1, n - 1):
        r[k] = L[k + 1] * x[k + 1] + V * y[k - 1] - L[k] * x[k] - V * y[k]
        if k == fi:
            r[k] += F * p.z_F
    r[n - 1] = V * y[n - 2] - (L_top + D) * x[n - 1]
    r[n] = y[n - 2] - rho
    return r


def _newton_compositions(rho: float, p: ColumnParams, tol: float, max_iter=80):
    """Damped Newton (finite-difference Jacobian) for (x profile, V)."""
    n = p.n_stages
    xv = np.empty(n + 1)
    xv[:n] = np.linspace(1.0 - rho, rho, n)
    xv[n] = 2.0 * p.F
    res = _steady_residual(xv, rho, p)
    best = np.linalg.norm(res, np.inf)
    for _ in range(max_iter):
        if best < tol:
            return xv, best
        jac = np.empty((n + 1, n + 1))
        for j in range(n + 1):
            h = 1e-7 * max(1.0, abs(xv[j]))
            pert = xv.copy()
            pert[j] += h
            jac[:, j] = (_steady_residual(pert, rho, p) - res) / h
        try:
            step = np.linalg.solve(jac, -res)
        except np.linalg.LinAlgError as exc:
            raise SteadyStateError(f"singular Jacobian in column solve at rho={rho}", residual=best) from exc
        lam = 1.0
        while lam > 1e-8:
            trial = xv + lam * step
            trial[:n] = np.clip(trial[:n], 1e-9, 1.0 - 1e-9)
            r_trial = _steady_residual(trial, rho, p)
            nrm = np.linalg.norm(r_trial, np.inf)
            if nrm < best:
                xv, res, best = trial, r_trial, nrm
                break
            lam *= 0.5
        else:
            raise SteadyStateError(f"column Newton stalled at rho={rho}", residual=best)
    if best >= tol:
        raise SteadyStateError(f"column Newton did not converge at rho={rho}", residual=best)
    return xv, best


def column_steady_state(rho: float, p: ColumnParams, tol=1e-10):
    """Steady state at purity ``rho`` (top vapor fraction; bottoms 1 - rho).

    Returns (state, inputs) with D = B = F/2 and hold-ups consistent with
    the hydraulic law at the steady flow profile.
    """
    xv, _ = _newton_compositions(rho, p, tol)
    n = p.n_stages
    x = xv[:n]
    V = float(xv[n])
    D = B = 0.5 * p.F
    L = V - D
    L_ref = L if abs(rho - p.rho_nom) < 1e-12 else nominal_point(p).L
    prof = nominal_liquid_profile(p, L_ref)
    steady_flow = np.empty(n)
    steady_flow[: p.feed_index + 1] = L + p.F
    steady_flow[p.feed_index + 1 :] = L
    M = np.full(n, p.M_k0)
    M[1 : n - 1] = p.M_k0 + p.tau_k * (steady_flow[1 : n - 1] - prof[1 : n - 1])
    return ColumnState(x=x, M=M), ColumnInputs(L=L, V=V, D=D, B=B, F=p.F)


@dataclass(frozen=True)
class NominalPoint:
    """Reference operating point: steady state at the nominal purity."""

    rho: float
    x: tuple
    L: float
    V: float
    heat_scale: float  # kW of column heat duty per unit boilup

    @property
    def inputs(self) -> ColumnInputs:
        return ColumnInputs(L=self.L, V=self.V, D=0.5, B=0.5)


@lru_cache(maxsize=8)
def _nominal_point_cached(p: ColumnParams) -> NominalPoint:
    xv, _ = _newton_compositions(p.rho_nom, p, 1e-11)
    V = float(xv[p.n_stages])
    return NominalPoint(
        rho=p.rho_nom,
        x=tuple(xv[: p.n_stages]),
        L=V - 0.5 * p.F,
        V=V,
        heat_scale=1000.0 / V,
    )


def nominal_point(p: ColumnParams) -> NominalPoint:
    """Nominal operating point (steady state at ``p.rho_nom``), cached.

    The heat scale makes the nominal boilup correspond to 1 MW of duty.
    """
    return _nominal_point_cached(p)
