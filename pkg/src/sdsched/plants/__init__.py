"""Nonlinear plant models, steady-state solvers and the ODE integrator."""

from .cstr import CstrParams, cstr_rhs, cstr_steady_state, cstr_steady_temperature
from .column import (
    ColumnInputs,
    ColumnParams,
    ColumnState,
    column_rhs,
    column_steady_state,
    nominal_liquid_profile,
    nominal_point,
    vapor_fraction,
)
from .integrate import integrate

__all__ = [
    "CstrParams",
    "cstr_rhs",
    "cstr_steady_state",
    "cstr_steady_temperature",
    "ColumnInputs",
    "ColumnParams",
    "ColumnState",
    "column_rhs",
    "column_steady_state",
    "nominal_liquid_profile",
    "nominal_point",
    "vapor_fraction",
    "integrate",
]
