"""Fixed-step explicit 4th-order integrator for the plant models."""

from __future__ import annotations

import numpy as np

from ..errors import SimulationDivergedError


def integrate(rhs, x0, inputs, t_span, step):
    """Integrate ``dx/dt = rhs(x, u)`` with classical RK4.

    ``inputs`` is either ``None``, a constant input vector, or a callable
    ``u(t)`` evaluated at the stage times.  ``t_span`` is (t0, tf); the
    step must tile the span.  Returns (t, X) with the trajectory sampled
    at every step boundary, X shaped (n_steps + 1, n_states).
    """
    t0, tf = float(t_span[0]), float(t_span[1])
    if step <= 0:
        raise ValueError("step must be positive")
    n_steps = round((tf - t0) / step)
    if n_steps < 1 or abs(t0 + n_steps * step - tf) > 1e-9 * max(1.0, abs(tf)):
        raise ValueError("step does not tile the integration span")

    if inputs is None:
        u_of_t = lambda t: None
    elif callable(inputs):
        u_of_t = inputs
    else:
        const = np.asarray(inputs, float)
        u_of_t = lambda t: const

    def f(x, t):
        u = u_of_t(t)
        return np.asarray(rhs(x, u) if u is not None else rhs(x, None), float)

    x = np.asarray(x0, float).copy()
    t = np.empty(n_steps + 1)
    traj = np.empty((n_steps + 1, x.size))
    t[0] = t0
    traj[0] = x
    h = step
    for i in range(n_steps):
        ti = t0 + i * h
        k1 = f(x, ti)
        k2 = f(x + 0.5 * h * k1, ti + 0.5 * h)
        k3 = f(x + 0.5 * h * k2, ti + 0.5 * h)
        k4 = f(x + h * k3, ti + h)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(x)):
            raise SimulationDivergedError(ti + h)
        t[i + 1] = ti + h
        traj[i + 1] = x
    return t, traj
