"""Solver-neutral mixed-integer linear model representation."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

INF = math.inf


@dataclass
class Constraint:
    coeffs: list  # [(var_index, coefficient), ...]
    sense: str  # "<=", ">=", "=="
    rhs: float
    name: str


@dataclass
class MilpModel:
    """Variables with bounds and integrality, linear rows, linear objective.

    The objective is always minimized; use negated coefficients to
    maximize.  Variable names must be unique (they become MPS columns).
    """

    var_names: list = field(default_factory=list)
    lb: list = field(default_factory=list)
    ub: list = field(default_factory=list)
    is_integer: list = field(default_factory=list)
    constraints: list = field(default_factory=list)
    obj_coeffs: dict = field(default_factory=dict)  # var_index -> coefficient
    obj_constant: float = 0.0
    name: str = "MODEL"
    _index: dict = field(default_factory=dict, repr=False)

    @property
    def n_vars(self) -> int:
        return len(self.var_names)

    @property
    def n_constraints(self) -> int:
        return len(self.constraints)

    def add_variable(self, name: str, lb=0.0, ub=INF, integer=False) -> int:
        if name in self._index:
            raise ValueError(f"duplicate variable name {name!r}")
        if lb > ub:
            raise ValueError(f"empty bound interval for {name!r}: [{lb}, {ub}]")
        if integer and not (math.isfinite(lb) and math.isfinite(ub)):
            raise ValueError(f"integer variable {name!r} must have finite bounds")
        idx = len(self.var_names)
        self.var_names.append(name)
        self.lb.append(float(lb))
        self.ub.append(float(ub))
        self.is_integer.append(bool(integer))
        self._index[name] = idx
        return idx

    def add_binary(self, name: str) -> int:
        return self.add_variable(name, 0.0, 1.0, integer=True)

    def index_of(self, name: str) -> int:
        return self._index[name]

    def add_constraint(self, coeffs, sense: str, rhs: float, name=None) -> int:
        if sense not in ("<=", ">=", "=="):
            raise ValueError(f"unknown sense {sense!r}")
        merged = {}
        for idx, c in coeffs:
            if not 0 <= idx < self.n_vars:
                raise IndexError(f"variable index {idx} out of range")
            if c != 0.0:
                merged[idx] = merged.get(idx, 0.0) + float(c)
        row = len(self.constraints)
        self.constraints.append(
            Constraint(sorted(merged.items()), sense, float(rhs), name or f"R{row}")
        )
        return row

    def set_objective(self, coeffs, constant=0.0):
        merged = {}
        for idx, c in coeffs:
            if c != 0.0:
                merged[idx] = merged.get(idx, 0.0) + float(c)
        self.obj_coeffs = merged
        self.obj_constant = float(constant)

    def add_objective_term(self, idx: int, coeff: float):
        if coeff != 0.0:
            self.obj_coeffs[idx] = self.obj_coeffs.get(idx, 0.0) + float(coeff)

    def objective_value(self, x) -> float:
        return self.obj_constant + sum(c * x[j] for j, c in self.obj_coeffs.items())

    def integer_indices(self) -> list:
        return [j for j, flag in enumerate(self.is_integer) if flag]

    def constraint_violation(self, x, row: Constraint) -> float:
        """Signed violation magnitude of one row at point ``x`` (0 if satisfied)."""
        act = sum(c * x[j] for j, c in row.coeffs)
        if row.sense == "<=":
            return max(0.0, act - row.rhs)
        if row.sense == ">=":
            return max(0.0, row.rhs - act)
        return abs(act - row.rhs)

    def max_violation(self, x) -> float:
        worst = 0.0
        for row in self.constraints:
            scale = max(1.0, abs(row.rhs), max((abs(c) for _, c in row.coeffs), default=1.0))
            worst = max(worst, self.constraint_violation(x, row) / scale)
        bound_viol = 0.0
        for j in range(self.n_vars):
            bound_viol = max(bound_viol, self.lb[j] - x[j], x[j] - self.ub[j])
        return max(worst, bound_viol)

    def canonical(self):
        """Order-insensitive, exact-value snapshot for equality checks."""
        return (
            self.name,
            tuple(self.var_names),
            tuple(self.lb),
            tuple(self.ub),
            tuple(self.is_integer),
            tuple((c.name, c.sense, c.rhs, tuple(sorted(c.coeffs))) for c in self.constraints),
            tuple(sorted(self.obj_coeffs.items())),
            self.obj_constant,
        )


def add_glover_product(model: MilpModel, z: int, x: int, name: str) -> int:
    """Auxiliary variable equal to the product binary(z) * continuous(x).

    Four inequalities pin w = z*x exactly at every mixed-integer point;
    requires finite bounds on x.
    """
    if not model.is_integer[z] or model.lb[z] < 0.0 or model.ub[z] > 1.0:
        raise ValueError("z must be a binary variable")
    xl, xu = model.lb[x], model.ub[x]
    if not (math.isfinite(xl) and math.isfinite(xu)):
        raise ValueError("x must have finite bounds for the product linearization")
    wl, wu = min(0.0, xl), max(0.0, xu)
    w = model.add_variable(name, wl, wu)
    model.add_constraint([(w, 1.0), (z, -xu)], "<=", 0.0, name=f"{name}_ub_z")
    model.add_constraint([(w, 1.0), (z, -xl)], ">=", 0.0, name=f"{name}_lb_z")
    model.add_constraint([(w, 1.0), (x, -1.0), (z, -xl)], "<=", -xl, name=f"{name}_ub_x")
    model.add_constraint([(w, 1.0), (x, -1.0), (z, -xu)], ">=", -xu, name=f"{name}_lb_x")
    return w


@dataclass
class Solution:
    """Solver outcome: variable values, objective, bound, gap and status."""

    status: str  # optimal | gap_limit | time_limit | node_limit | infeasible | unbounded
    x: np.ndarray | None = None
    objective: float = math.nan
    best_bound: float = -INF
    gap: float = math.inf
    incumbent_log: list = field(default_factory=list)  # (wall_seconds, incumbent, bound)
    n_nodes: int = 0
    n_simplex_iterations: int = 0

    @property
    def feasible(self) -> bool:
        return self.x is not None

    def value(self, idx: int) -> float:
        return float(self.x[idx])


def relative_gap(incumbent: float, bound: float) -> float:
    if not math.isfinite(incumbent):
        return math.inf
    return max(0.0, incumbent - bound) / max(abs(incumbent), 1e-9)


@dataclass
class SolverConfig:
    """Branch-and-bound controls; defaults match the artifact's use."""

    gap: float = 0.01
    time_limit: float | None = None
    node_limit: int | None = None
    integrality_tol: float = 1e-6
    feasibility_tol: float = 1e-7
    workers: int = 1
    log_interval: float = math.inf  # seconds between periodic bound log entries
    heuristic_period: int = 50  # rounding heuristic every N nodes (0 disables)

    def __post_init__(self):
        if self.gap < 0:
            raise ValueError("gap target must be >= 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
