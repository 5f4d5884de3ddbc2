"""Reference-model parameter search: fastest transitions plus grid sweep.

For a candidate (time constant, set-point elevation), each of the six
ordered transitions between the operating points is first shaped by a
small MILP that maximizes the reference trajectory's time inside the
target band, then validated by simulating the controlled nonlinear plant.
The sweep walks the time constant upward, finds the largest feasible
elevation for each value, and keeps the candidate with the smallest
summed transition time (ties: smaller time constant, then smaller
elevation).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .collocation import TimeGrids, collocate_linear_ode
from .control import (
    FilterState,
    PidParams,
    PiParams,
    simulate_cstr_closed_loop,
    simulate_column_closed_loop,
)
from .errors import SdschedError
from .milp import MilpModel, SolverConfig, solve_milp
from .plants.cstr import CstrParams, cstr_steady_state
from .plants.column import ColumnParams
from .sbm import SbmParams


@dataclass(frozen=True)
class OperatingPoint:
    """A steady target: nominal value plus the band that counts as on-spec."""

    name: str
    target: float
    band_lo: float
    band_hi: float


@dataclass
class TransitionResult:
    start: OperatingPoint
    end: OperatingPoint
    feasible: bool
    dt: float  # time to reach the band and stay (plant time units)
    w_sp_steps: np.ndarray
    reason: str = ""


@dataclass
class TransitionReport:
    """Outcome of one candidate evaluation over all ordered transitions."""

    feasible: bool
    transitions: list
    dt_s: list = field(default_factory=list)

    @property
    def dt_sum(self) -> float:
        if not self.feasible:
            raise SdschedError("dt_sum undefined for infeasible candidates")
        return float(sum(self.dt_s))


def fastest_transition(start_value, target: OperatingPoint, sbm: SbmParams, grids: TimeGrids, eps_inner=0.0, gap=0.0):
    """Set-point steps driving the reference into the target band fastest.

    Transcribes the reference dynamics by collocation and maximizes the
    number of discrete steps whose collocation points sit inside the band
    shrunk by ``eps_inner``.  A transition that starts inside the shrunk
    band returns a constant set-point immediately.  Raises if the MILP is
    infeasible (band unreachable under the set-point bounds).
    """
    lo = target.band_lo + eps_inner
    hi = target.band_hi - eps_inner
    if lo > hi:
        raise ValueError("band empties out after applying the safety margin")
    n_dis = grids.n_dis
    if abs(start_value - target.target) < 1e-12:
        return np.full(n_dis, float(target.target))

    m = MilpModel(name="TRANS")
    w_vars = [[m.add_variable(f"W{t}", sbm.w_min, sbm.w_max)] for t in range(n_dis)]
    z_vars = [m.add_binary(f"Z{t}") for t in range(n_dis)]
    # loose but finite state bounds: the filter cannot leave the hull of its
    # input range by more than the momentum it can build, so a one-range
    # margin (three input ranges per time constant for the velocity) is
    # unreachable and only serves numerical conditioning
    w_range = sbm.w_max - sbm.w_min
    x_lo = min(sbm.w_min, start_value) - w_range
    x_hi = max(sbm.w_max, start_value) + w_range
    v_cap = 3.0 * (w_range + abs(start_value - target.target)) / sbm.beta
    state_bounds = [(x_lo, x_hi), (-v_cap, v_cap)][: sbm.r]
    x_vars = [
        [
            [m.add_variable(f"X{fe}_{j}_{s}", state_bounds[s][0], state_bounds[s][1]) for s in range(sbm.r)]
            for j in range(grids.n_cp + 1)
        ]
        for fe in range(grids.n_elements)
    ]
    if sbm.r == 2:
        a_mat = [[0.0, 1.0], [-1.0 / sbm.tau2, -sbm.tau1 / sbm.tau2]]
        d_mat = [[0.0], [1.0 / sbm.tau2]]
        x_init = (start_value, 0.0)
    else:
        a_mat = [[-1.0 / sbm.tau1]]
        d_mat = [[1.0 / sbm.tau1]]
        x_init = (start_value,)
    collocate_linear_ode(m, a_mat, None, None, d_mat, grids, {"x": x_vars, "w": w_vars}, x_init, name="S")

    # tie break: among maximum-coverage solutions, hug the target as early
    # as possible (the coverage count alone fixes only the entry step, not
    # the path within it, and the returned profile should settle on the
    # target, not wander the band).  The weight is scaled so the penalty
    # can never trade away a covered step.
    n_pts = grids.n_elements * grids.n_cp
    span = (sbm.w_max - sbm.w_min) + (target.band_hi - target.band_lo) + abs(start_value - target.target)
    gamma = 0.1 / (n_pts * span)
    obj = [(z, -1.0) for z in z_vars]
    for fe in range(grids.n_elements):
        step = grids.element_step(fe)
        z = z_vars[step]
        for k in range(1, grids.n_cp + 1):
            w_fil = x_vars[fe][k][0]
            m.add_constraint([(w_fil, 1.0), (z, -1.0)], ">=", lo - 1.0, name=f"BLO{fe}_{k}")
            m.add_constraint([(w_fil, 1.0), (z, 1.0)], "<=", hi + 1.0, name=f"BHI{fe}_{k}")
            dev = m.add_variable(f"E{fe}_{k}", 0.0, span + 1.0)
            m.add_constraint([(dev, 1.0), (w_fil, -1.0)], ">=", -target.target, name=f"EP{fe}_{k}")
            m.add_constraint([(dev, 1.0), (w_fil, 1.0)], ">=", target.target, name=f"EN{fe}_{k}")
            obj.append((dev, gamma))
    m.set_objective(obj)

    sol = solve_milp(m, SolverConfig(gap=gap, heuristic_period=0))
    if not sol.feasible:
        raise SdschedError(f"transition to {target.name} unreachable under the set-point bounds")
    return np.array([sol.value(w_vars[t][0]) for t in range(n_dis)])


def _entry_index(inside: np.ndarray):
    """Index of the first entry, provided the signal never leaves afterwards.

    Returns None when the band is never reached or is left again after the
    first entry (an excursion after arrival fails the candidate even if
    the signal returns later).
    """
    if not inside.any():
        return None
    first = int(np.argmax(inside))
    if not inside[first:].all():
        return None
    return first


@dataclass
class TuningProblem:
    """Plant, controller, grids and feasibility rules for the sweep."""

    kind: str  # "cstr" | "column"
    plant: object
    controller: object  # PidParams or (PiParams, PiParams)
    points: list
    grids: TimeGrids
    r: int
    y_min: float
    y_max: float
    zeta: float = 1.0
    eps_inner: float = 0.0
    track_tol: float | None = None  # column: reference tracking requirement
    sim_step: float = 1e-3
    gap: float = 0.01  # coverage steps are integral, so 1 % never trades one

    def sbm(self, beta: float, elevation: float) -> SbmParams:
        return SbmParams(r=self.r, beta=beta, y_min=self.y_min, y_max=self.y_max, zeta=self.zeta, elevation=elevation)

    def transitions(self):
        for a in self.points:
            for b in self.points:
                if a.name != b.name:
                    yield a, b


def cstr_tuning_problem(
    plant: CstrParams,
    pid: PidParams,
    points,
    grids: TimeGrids,
    eps_inner=0.003,
    sim_step=1e-3,
) -> TuningProblem:
    return TuningProblem(
        kind="cstr",
        plant=plant,
        controller=pid,
        points=list(points),
        grids=grids,
        r=2,
        y_min=min(p.target for p in points),
        y_max=max(p.target for p in points),
        eps_inner=eps_inner,
        sim_step=sim_step,
    )


def column_tuning_problem(
    plant: ColumnParams,
    pis,
    points,
    grids: TimeGrids,
    track_tol=0.005,
    sim_step=0.01,
) -> TuningProblem:
    return TuningProblem(
        kind="column",
        plant=plant,
        controller=pis,
        points=list(points),
        grids=grids,
        r=1,
        y_min=min(p.target for p in points),
        y_max=max(p.target for p in points),
        eps_inner=0.0,
        track_tol=track_tol,
        sim_step=sim_step,
    )


def evaluate_transition(problem: TuningProblem, sbm: SbmParams, start: OperatingPoint, end: OperatingPoint) -> TransitionResult:
    """Shape one transition, simulate it, and judge feasibility.

    A reference too fast for the plant can break the simulation outright
    (state bounds violated); that counts as an infeasible transition.
    """
    w_sp = fastest_transition(start.target, end, sbm, problem.grids, problem.eps_inner, problem.gap)
    dt_dis = problem.grids.dt_dis
    try:
        return _judge_simulation(problem, sbm, start, end, w_sp, dt_dis)
    except SdschedError as exc:
        return TransitionResult(start, end, False, math.inf, w_sp, f"simulation failed: {exc}")


def _judge_simulation(problem, sbm, start, end, w_sp, dt_dis):
    if problem.kind == "cstr":
        traj = simulate_cstr_closed_loop(
            problem.plant, problem.controller, sbm, w_sp, dt_dis,
            x0=_cstr_x0(problem.plant, start.target),
            filter0=FilterState.at_rest(start.target, 2),
            step=problem.sim_step,
        )
        ca = traj.states[:, 0]
        inside = (ca >= end.band_lo) & (ca <= end.band_hi)
        entry = _entry_index(inside)
        if entry is None:
            return TransitionResult(start, end, False, math.inf, w_sp, "band not reached or left after entry")
        return TransitionResult(start, end, True, float(traj.t[entry]), w_sp)

    traj = simulate_column_closed_loop(
        problem.plant, problem.controller, sbm, w_sp, dt_dis, rho0=start.target, step=problem.sim_step
    )
    y_d = traj.states[:, 0]
    x_b = traj.states[:, 1]
    w_fil = traj.w_fil
    tol = problem.track_tol
    track_err = max(np.abs(y_d - w_fil).max(), np.abs(x_b - (1.0 - w_fil)).max())
    if track_err > tol:
        return TransitionResult(start, end, False, math.inf, w_sp, f"tracking error {track_err:.4f} > {tol}")
    inside = (np.abs(y_d - end.target) <= tol) & (np.abs(x_b - (1.0 - end.target)) <= tol)
    entry = _entry_index(inside)
    if entry is None:
        return TransitionResult(start, end, False, math.inf, w_sp, "mole fractions did not settle")
    return TransitionResult(start, end, True, float(traj.t[entry]), w_sp)


def _cstr_x0(plant, ca0):
    temp0, _ = cstr_steady_state(ca0, plant)
    return (ca0, temp0)


def evaluate_candidate(problem: TuningProblem, sbm: SbmParams, workers: int = 1) -> TransitionReport:
    """All ordered transitions for one (time constant, elevation) candidate."""
    pairs = list(problem.transitions())
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda ab: evaluate_transition(problem, sbm, *ab), pairs))
    else:
        results = []
        for a, b in pairs:
            res = evaluate_transition(problem, sbm, a, b)
            results.append(res)
            if not res.feasible:
                break
    feasible = len(results) == len(pairs) and all(r.feasible for r in results)
    return TransitionReport(feasible=feasible, transitions=results, dt_s=[r.dt for r in results] if feasible else [])


@dataclass
class SweepRow:
    beta: float
    max_elevation: float
    dt_sum: float
    feasible: bool


@dataclass
class TuneResult:
    best: SbmParams | None
    best_report: TransitionReport | None
    sweep: list

    def best_row(self) -> SweepRow:
        if self.best is None:
            raise SdschedError("no feasible candidate in the searched range")
        for row in self.sweep:
            if row.feasible and abs(row.beta - self.best.beta) < 1e-12:
                return row
        raise SdschedError("sweep table lost the winning row")


def tune(
    problem: TuningProblem,
    beta_start: float,
    beta_stop: float,
    beta_step: float,
    elevation_step: float,
    elevation_max: float = 1.0,
    workers: int = 1,
    stop_after_feasible: int | None = None,
) -> TuneResult:
    """Grid search over (time constant, elevation).

    Walks the time constant from ``beta_start`` upward; for each feasible
    value, raises the elevation in ``elevation_step`` increments until a
    transition fails, recording the summed transition time at the largest
    feasible elevation.  ``stop_after_feasible`` optionally truncates the
    walk that many grid points after the first feasible time constant
    (the sweep table then covers at least that neighborhood).
    """
    n_beta = round((beta_stop - beta_start) / beta_step)
    betas = [round(beta_start + k * beta_step, 12) for k in range(n_beta + 1)]
    sweep = []
    best = None
    best_report = None
    best_key = None
    first_feasible_at = None
    for bi, beta in enumerate(betas):
        if stop_after_feasible is not None and first_feasible_at is not None and bi > first_feasible_at + stop_after_feasible:
            break
        base = evaluate_candidate(problem, problem.sbm(beta, 0.0), workers)
        if not base.feasible:
            sweep.append(SweepRow(beta, math.nan, math.nan, False))
            continue
        if first_feasible_at is None:
            first_feasible_at = bi
        best_elev = 0.0
        best_rep = base
        k = 1
        while k * elevation_step <= elevation_max + 1e-12:
            elev = round(k * elevation_step, 12)
            rep = evaluate_candidate(problem, problem.sbm(beta, elev), workers)
            if not rep.feasible:
                break
            best_elev, best_rep = elev, rep
            k += 1
        sweep.append(SweepRow(beta, best_elev, best_rep.dt_sum, True))
        key = (best_rep.dt_sum, beta, best_elev)
        if best_key is None or key < best_key:
            best_key = key
            best = problem.sbm(beta, best_elev)
            best_report = best_rep
    return TuneResult(best=best, best_report=best_report, sweep=sweep)
