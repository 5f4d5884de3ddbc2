"""Set-point filter, tracking controllers, and closed-loop simulation.

The filter realizes the linear reference dynamics exactly (zero-order-hold
discretization via the matrix exponential), the PID/PI laws track the
filtered set-point, and the closed-loop simulators couple filter,
controller and nonlinear plant on a shared fixed step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

from ._loops import column_closed_loop_jit, cstr_closed_loop_jit
from .errors import SdschedError, SimulationDivergedError
from .plants.column import ColumnParams, column_steady_state, nominal_liquid_profile, nominal_point
from .plants.cstr import CstrParams, cstr_steady_state
from .sbm import SbmParams

DEFAULT_CSTR_STEP = 1e-3  # hours
DEFAULT_COLUMN_STEP = 0.01  # minutes


@dataclass
class FilterState:
    """Filtered set-point and its derivatives up to order r-1."""

    z: np.ndarray

    @classmethod
    def at_rest(cls, w: float, r: int) -> "FilterState":
        z = np.zeros(r)
        z[0] = w
        return cls(z)

    @property
    def value(self) -> float:
        return float(self.z[0])

    @property
    def derivative(self) -> float:
        return float(self.z[1]) if self.z.size > 1 else 0.0


@lru_cache(maxsize=64)
def _filter_discretization(r, tau1, tau2, dt):
    """Exact ZOH discretization (Ad, bd) of the filter dynamics."""
    if r == 1:
        ad = math.exp(-dt / tau1)
        return np.array([[ad]]), np.array([1.0 - ad])
    a = np.array([[0.0, 1.0], [-1.0 / tau2, -tau1 / tau2]])
    b = np.array([0.0, 1.0 / tau2])
    aug = np.zeros((3, 3))
    aug[:2, :2] = a * dt
    aug[:2, 2] = b * dt
    phi = expm(aug)
    return phi[:2, :2].copy(), phi[:2, 2].copy()


def filter_discretization(sbm: SbmParams, dt: float):
    """(Ad, bd) advancing the filter state exactly over ``dt``."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    return _filter_discretization(sbm.r, sbm.tau1, sbm.tau2, dt)


def filter_advance(fs: FilterState, w_sp: float, dt: float, sbm: SbmParams) -> FilterState:
    """Advance the filtered set-point one interval with w_SP held constant."""
    ad, bd = filter_discretization(sbm, dt)
    return FilterState(ad @ fs.z + bd * w_sp)


def filter_second_derivative(fs: FilterState, w_sp: float, sbm: SbmParams) -> float:
    """d2w_fil/dt2 from the defining second-order dynamics."""
    if sbm.r != 2:
        raise ValueError("second derivative defined for order-2 models only")
    return (w_sp - fs.z[0] - sbm.tau1 * fs.z[1]) / sbm.tau2


@dataclass(frozen=True)
class PidParams:
    """PID tracking controller (output = actuator command, clamped)."""

    K_P: float = 1000.0
    tau_D: float = 0.1
    tau_I: float = 0.2
    u_bias: float = 0.0
    output_bounds: tuple = (0.0, math.inf)

    def __post_init__(self):
        if self.tau_I <= 0:
            raise ValueError("integral time must be positive")


def default_cstr_pid(plant: CstrParams, c_a_bias: float = 0.3) -> PidParams:
    """Reference PID gains; bias holds the plant at ``c_a_bias`` steady state."""
    _, q_bias = cstr_steady_state(c_a_bias, plant)
    return PidParams(u_bias=q_bias)


def pid_output(e: float, e_integral: float, e_derivative: float, p: PidParams) -> float:
    raw = p.K_P * (e + p.tau_D * e_derivative + e_integral / p.tau_I) + p.u_bias
    return min(max(raw, p.output_bounds[0]), p.output_bounds[1])


@dataclass(frozen=True)
class PiParams:
    """PI law for one column composition loop."""

    K_P: float
    tau_I: float
    u_bias: float
    output_bounds: tuple

    def __post_init__(self):
        if self.tau_I <= 0:
            raise ValueError("integral time must be positive")


def default_column_pis(p: ColumnParams):
    """(V-loop, L-loop) PI parameters; biases from the nominal point."""
    nom = nominal_point(p)
    pi_v = PiParams(K_P=-792.0 / p.F, tau_I=25.8, u_bias=nom.V, output_bounds=p.bound("V"))
    pi_l = PiParams(K_P=838.0 / p.F, tau_I=27.3, u_bias=nom.L, output_bounds=p.bound("L"))
    return pi_v, pi_l


def pi_output(e: float, e_integral: float, p: PiParams) -> float:
    raw = p.K_P * (e + e_integral / p.tau_I) + p.u_bias
    return min(max(raw, p.output_bounds[0]), p.output_bounds[1])


def pi_column_outputs(e_xB, e_yD, int_xB, int_yD, p_V: PiParams, p_L: PiParams):
    """Boilup and reflux commands for the two composition loops."""
    return pi_output(e_xB, int_xB, p_V), pi_output(e_yD, int_yD, p_L)


@dataclass
class ClosedLoopTrajectory:
    """Sampled closed-loop run: plant outputs, reference signals, commands.

    ``states``/``outputs`` column meanings are in ``state_names`` and
    ``output_names``; ``w_fil_derivs`` stacks the reference derivatives
    used by the demand models (order 1: dw; order 2: dw and d2w).
    """

    t: np.ndarray
    states: np.ndarray
    w_sp: np.ndarray
    w_fil: np.ndarray
    w_fil_derivs: np.ndarray
    outputs: np.ndarray
    state_names: list
    output_names: list
    final_full_state: object = None

    @property
    def n_samples(self) -> int:
        return self.t.size

    def csv_header(self):
        return ["t"] + self.state_names + ["w_SP", "w_fil"] + [
            f"w_fil_d{i+1}" for i in range(self.w_fil_derivs.shape[1])
        ] + self.output_names

    def to_rows(self):
        for i in range(self.t.size):
            yield [self.t[i], *self.states[i], self.w_sp[i], self.w_fil[i], *self.w_fil_derivs[i], *self.outputs[i]]


def _expand_setpoints(w_sp_steps, dt_dis, step):
    n_sub = round(dt_dis / step)
    if n_sub < 1 or abs(n_sub * step - dt_dis) > 1e-9 * max(1.0, dt_dis):
        raise ValueError("integrator step must divide the discrete interval")
    return np.asarray(w_sp_steps, float), n_sub


def simulate_cstr_closed_loop(
    plant: CstrParams,
    pid: PidParams,
    sbm: SbmParams,
    w_sp_steps,
    dt_dis: float,
    x0=None,
    filter0: FilterState | None = None,
    integral0: float | None = None,
    step: float = DEFAULT_CSTR_STEP,
) -> ClosedLoopTrajectory:
    """Closed-loop reactor run under a piecewise-constant set-point.

    Defaults start the loop at the steady state matching the first
    set-point value: plant at the steady point, filter at rest on it, and
    the controller integral pre-loaded so the commanded cooling equals the
    steady cooling (continuous regulation, no start-up transient).
    """
    if sbm.r != 2:
        raise ValueError("the reactor loop uses the order-2 reference model")
    w_sp_steps, n_sub = _expand_setpoints(w_sp_steps, dt_dis, step)
    if x0 is None:
        ca0 = float(w_sp_steps[0])
        temp0, _ = cstr_steady_state(ca0, plant)
    else:
        ca0, temp0 = float(x0[0]), float(x0[1])
    if filter0 is None:
        filter0 = FilterState.at_rest(ca0, sbm.r)
    if integral0 is None:
        # controllers regulate continuously, so a run starting at a steady
        # point inherits the integral that holds the actuator there
        _, q_hold = cstr_steady_state(ca0, plant)
        integral0 = pid.tau_I * (q_hold - pid.u_bias) / pid.K_P
    ad, bd = filter_discretization(sbm, step)
    umin, umax = pid.output_bounds
    ca, temp, w, wd, u, integ, diverged = cstr_closed_loop_jit(
        ca0,
        temp0,
        filter0.z[0],
        filter0.z[1],
        float(integral0),
        w_sp_steps,
        n_sub,
        step,
        ad,
        bd,
        pid.K_P,
        pid.tau_D,
        pid.tau_I,
        pid.u_bias,
        umin,
        umax,
        plant.as_array(),
    )
    if diverged >= 0.0:
        raise SimulationDivergedError(diverged)
    n = ca.size - 1
    t = np.arange(n + 1) * step
    w_sp_full = np.repeat(w_sp_steps, n_sub)
    w_sp_full = np.append(w_sp_full, w_sp_full[-1])
    wdd = (w_sp_full - w - sbm.tau1 * wd) / sbm.tau2
    return ClosedLoopTrajectory(
        t=t,
        states=np.column_stack([ca, temp]),
        w_sp=w_sp_full,
        w_fil=w,
        w_fil_derivs=np.column_stack([wd, wdd]),
        outputs=u.reshape(-1, 1),
        state_names=["C_A", "T"],
        output_names=["Q_cool"],
    )


def simulate_column_closed_loop(
    plant: ColumnParams,
    pis,
    sbm: SbmParams,
    w_sp_steps,
    dt_dis: float,
    rho0: float | None = None,
    x0=None,
    step: float = DEFAULT_COLUMN_STEP,
) -> ClosedLoopTrajectory:
    """Closed-loop column run; purity set-point drives both compositions.

    ``pis`` is the (boilup loop, reflux loop) pair.  The run starts at the
    steady state of ``rho0`` (default: first set-point value) unless a
    full (x, M) state is supplied; integral states are pre-loaded so the
    commanded flows start at the steady flows of ``rho0``.
    """
    if sbm.r != 1:
        raise ValueError("the column loop uses the order-1 reference model")
    pi_v, pi_l = pis
    w_sp_steps, n_sub = _expand_setpoints(w_sp_steps, dt_dis, step)
    if rho0 is None:
        rho0 = float(w_sp_steps[0])
    if x0 is None:
        st, inp = column_steady_state(rho0, plant)
        x_init, m_init = st.x, st.M
    else:
        x_init, m_init = np.asarray(x0[0], float), np.asarray(x0[1], float)
        _, inp = column_steady_state(rho0, plant)
    iv0 = pi_v.tau_I * (inp.V - pi_v.u_bias) / pi_v.K_P
    il0 = pi_l.tau_I * (inp.L - pi_l.u_bias) / pi_l.K_P
    nom = nominal_point(plant)
    l_prof = nominal_liquid_profile(plant, nom.L)
    a_fil = math.exp(-step / sbm.tau1)
    d_lo, d_hi = plant.bound("D")
    yd, xb, xd, w, v_tr, l_tr, d_tr, b_tr, x_fin, m_fin, iv, il, x_lo, x_hi, diverged = column_closed_loop_jit(
        np.asarray(x_init, float).copy(),
        np.asarray(m_init, float).copy(),
        float(rho0),
        iv0,
        il0,
        w_sp_steps,
        n_sub,
        step,
        a_fil,
        sbm.tau1,
        pi_v.K_P,
        pi_v.tau_I,
        pi_v.u_bias,
        pi_v.output_bounds[0],
        pi_v.output_bounds[1],
        pi_l.K_P,
        pi_l.tau_I,
        pi_l.u_bias,
        pi_l.output_bounds[0],
        pi_l.output_bounds[1],
        plant.z_F,
        plant.alpha,
        l_prof,
        plant.M_k0,
        plant.tau_k,
        plant.feed_index,
        plant.F,
        d_lo,
        d_hi,
    )
    if diverged >= 0.0:
        raise SimulationDivergedError(diverged)
    if x_lo < -1e-9 or x_hi > 1.0 + 1e-9:
        raise SdschedError(f"composition left [0, 1]: range [{x_lo:.3e}, {x_hi:.3e}]")
    n = yd.size - 1
    t = np.arange(n + 1) * step
    w_sp_full = np.repeat(w_sp_steps, n_sub)
    w_sp_full = np.append(w_sp_full, w_sp_full[-1])
    wdot = (w_sp_full - w) / sbm.tau1
    return ClosedLoopTrajectory(
        t=t,
        states=np.column_stack([yd, xb, xd]),
        w_sp=w_sp_full,
        w_fil=w,
        w_fil_derivs=wdot.reshape(-1, 1),
        outputs=np.column_stack([v_tr, l_tr, d_tr, b_tr]),
        state_names=["y_D", "x_B", "x_D"],
        output_names=["V", "L", "D", "B"],
        final_full_state=(x_fin, m_fin),
    )


def simulate_closed_loop(plant, controller, sbm: SbmParams, w_sp_steps, x0, grids, step=None):
    """Dispatch to the reactor or column loop based on the plant type.

    ``grids`` supplies the discrete interval length; the set-point
    sequence must cover every discrete step of the horizon.
    """
    dt_dis = grids.dt_dis if hasattr(grids, "dt_dis") else float(grids)
    if isinstance(plant, CstrParams):
        return simulate_cstr_closed_loop(
            plant, controller, sbm, w_sp_steps, dt_dis, x0=x0, step=step or DEFAULT_CSTR_STEP
        )
    if isinstance(plant, ColumnParams):
        return simulate_column_closed_loop(
            plant, controller, sbm, w_sp_steps, dt_dis, x0=x0, step=step or DEFAULT_COLUMN_STEP
        )
    raise TypeError(f"unsupported plant type {type(plant)!r}")
