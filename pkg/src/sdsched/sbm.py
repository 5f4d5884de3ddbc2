"""Low-order linear closed-loop response model and its parameters.

The controlled process output is forced to follow

    w_fil + tau1 * dw/dt + tau2 * d2w/dt2 = w_SP      (order 2)
    w_fil + tau  * dw/dt                  = w_SP      (order 1)

where the second-order time constants derive from a natural-oscillation
constant and a damping ratio.  The set-point w_SP may be elevated beyond
the controlled variable's operating range to speed up transitions.
"""

from __future__ import annotations

from dataclasses import dataclass


def taus_from_beta(beta: float, zeta: float = 1.0):
    """Second-order time constants (tau1, tau2) = (2*zeta*beta, beta^2)."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    return 2.0 * zeta * beta, beta * beta


@dataclass(frozen=True)
class SbmParams:
    """Closed-loop response model parameters.

    ``beta`` is the natural-oscillation constant for order 2 and the plain
    time constant for order 1, in the plant's time unit.  ``y_min``/``y_max``
    bound the controlled variable's operating range; the admissible
    set-point range extends ``elevation`` beyond it on both sides.
    """

    r: int
    beta: float
    y_min: float
    y_max: float
    zeta: float = 1.0
    elevation: float = 0.0

    def __post_init__(self):
        if self.r not in (1, 2):
            raise ValueError("model order must be 1 or 2")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.elevation < 0:
            raise ValueError("elevation must be >= 0")
        if self.y_max <= self.y_min:
            raise ValueError("y_max must exceed y_min")

    @property
    def tau1(self) -> float:
        return 2.0 * self.zeta * self.beta if self.r == 2 else self.beta

    @property
    def tau2(self) -> float:
        return self.beta * self.beta if self.r == 2 else 0.0

    @property
    def w_min(self) -> float:
        return self.y_min - self.elevation

    @property
    def w_max(self) -> float:
        return self.y_max + self.elevation

    def with_elevation(self, elevation: float) -> "SbmParams":
        return SbmParams(self.r, self.beta, self.y_min, self.y_max, self.zeta, elevation)

    def with_beta(self, beta: float) -> "SbmParams":
        return SbmParams(self.r, beta, self.y_min, self.y_max, self.zeta, self.elevation)

    def state_matrices(self):
        """Continuous-time (A, b) of the filter state [w, dw/dt, ...]."""
        import numpy as np

        if self.r == 1:
            return np.array([[-1.0 / self.tau1]]), np.array([1.0 / self.tau1])
        a = np.array([[0.0, 1.0], [-1.0 / self.tau2, -self.tau1 / self.tau2]])
        b = np.array([0.0, 1.0 / self.tau2])
        return a, b
