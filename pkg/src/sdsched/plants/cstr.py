"""Exothermic A->B stirred-tank reactor: dynamics and steady-state solver.

States are the concentration of A (mol/L) and the reactor temperature (K);
the manipulated input is the cooling duty (MJ/h).  Time is in hours.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .._accel import maybe_njit
from ..errors import SteadyStateError


@dataclass(frozen=True)
class CstrParams:
    """Reactor parameters; defaults describe the reference plant.

    ``dHr_over_rhoCp`` is the lumped reaction-heat parameter in K·L/mol
    (negative: exothermic).  ``q``/``V`` in m³/h and m³, rate constant in
    1/h, activation temperature Ea/R in K.
    """

    q: float = 100.0
    V: float = 100.0
    C_A_feed: float = 1.0
    k: float = 7.2e10
    Ea_over_R: float = 6500.0
    T_feed: float = 350.0
    dHr_over_rhoCp: float = -209.0
    rho: float = 1000.0
    c_P: float = 0.239

    def __post_init__(self):
        for name in ("q", "V", "C_A_feed", "k", "Ea_over_R", "T_feed", "rho", "c_P"):
            if getattr(self, name) <= 0:
                raise ValueError(f"CstrParams.{name} must be > 0")
        if self.dHr_over_rhoCp >= 0:
            raise ValueError("CstrParams.dHr_over_rhoCp must be < 0 (exothermic)")

    @property
    def q_over_V(self) -> float:
        return self.q / self.V

    @property
    def heat_capacity_MJ_per_K(self) -> float:
        """Total thermal mass rho*c_P*V in MJ/K (c_P given in J/(kg K))."""
        return self.rho * self.c_P * self.V * 1e-6

    def as_array(self) -> np.ndarray:
        """Flat parameter vector consumed by the jitted kernels."""
        return np.array(
            [
                self.q_over_V,
                self.C_A_feed,
                self.k,
                self.Ea_over_R,
                self.T_feed,
                self.dHr_over_rhoCp,
                self.heat_capacity_MJ_per_K,
            ]
        )


def cstr_rhs_kernel(c_a, temp, q_cool, par):
    """Time derivatives (dC_A/dt, dT/dt) of the reactor balances."""
    q_over_v = par[0]
    rate = par[2] * np.exp(-par[3] / temp) * c_a
    dca = q_over_v * (par[1] - c_a) - rate
    dtemp = q_over_v * (par[4] - temp) - par[5] * rate - q_cool / par[6]
    return dca, dtemp


cstr_rhs_jit = maybe_njit(cstr_rhs_kernel)


def cstr_rhs(state, q_cool, p: CstrParams):
    """Evaluate the material and energy balances at one state.

    ``state`` is (C_A, T); returns (dC_A/dt, dT/dt) in (mol/(L·h), K/h).
    Non-finite output indicates mis-scaled parameters or units.
    """
    c_a, temp = float(state[0]), float(state[1])
    dca, dtemp = cstr_rhs_kernel(c_a, temp, float(q_cool), p.as_array())
    if not (math.isfinite(dca) and math.isfinite(dtemp)):
        raise FloatingPointError("non-finite reactor derivative; check parameters/units")
    return dca, dtemp


def cstr_steady_temperature(c_a: float, p: CstrParams, t_lo=200.0, t_hi=400.0, tol=1e-10):
    """Temperature zeroing the material balance at a held concentration.

    Bisection on T in [t_lo, t_hi]; the balance is monotone decreasing in T,
    so a sign change over the bracket certifies the root.
    """
    if not 0.0 < c_a < p.C_A_feed:
        raise SteadyStateError(f"target C_A={c_a} outside (0, {p.C_A_feed})")

    def material(temp):
        return p.q_over_V * (p.C_A_feed - c_a) - p.k * math.exp(-p.Ea_over_R / temp) * c_a

    f_lo, f_hi = material(t_lo), material(t_hi)
    if f_lo * f_hi > 0:
        raise SteadyStateError(
            f"no steady temperature in [{t_lo}, {t_hi}] K for C_A={c_a}", residual=min(abs(f_lo), abs(f_hi))
        )
    lo, hi = t_lo, t_hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = material(mid)
        if abs(f_mid) < tol:
            return mid
        if f_lo * f_mid <= 0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
    return 0.5 * (lo + hi)


def cstr_steady_state(c_a_target: float, p: CstrParams, tol=1e-10):
    """Steady (T, Q_cool) holding the reactor at ``c_a_target``.

    The temperature comes from the material balance (bisection) and the
    cooling duty from the energy balance in closed form; the returned pair
    zeroes both derivatives to the requested tolerance.
    """
    temp = cstr_steady_temperature(c_a_target, p, tol=tol)
    rate = p.k * math.exp(-p.Ea_over_R / temp) * c_a_target
    q_cool = (p.q_over_V * (p.T_feed - temp) - p.dHr_over_rhoCp * rate) * p.heat_capacity_MJ_per_K
    return temp, q_cool
