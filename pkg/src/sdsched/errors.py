"""Exception types shared across the package."""


class SdschedError(Exception):
    """Base class for all package-specific failures."""


class SteadyStateError(SdschedError):
    """A steady-state solve did not converge or the target is infeasible."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class SimulationDivergedError(SdschedError):
    """A simulated state became non-finite; carries the offending time."""

    def __init__(self, time, message=None):
        super().__init__(message or f"non-finite state at t={time:.6g}")
        self.time = time


class SolverError(SdschedError):
    """LP/MILP solver failure (stall, bad model, exhausted limits)."""


class InfeasibleError(SolverError):
    """Model proven infeasible."""


class ConfigError(SdschedError):
    """Scenario configuration invalid; message carries the field path."""
