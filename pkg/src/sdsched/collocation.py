"""Nested time grids and Lagrange collocation of linear ODE constraints.

Three aligned grids discretize the horizon: the coarsest carries the
piecewise-constant electricity price, the middle one discrete decisions
and set-points, the finest the finite elements for continuous states.
Within each element, states are interpolated by a Lagrange polynomial
anchored at the element start plus the collocation points, and the ODE is
enforced at the collocation points, yielding linear equality constraints.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre


@lru_cache(maxsize=16)
def radau_points(n_cp: int) -> tuple:
    """Right-endpoint Radau collocation points on (0, 1], ascending."""
    if n_cp < 1:
        raise ValueError("need at least one collocation point")
    if n_cp == 1:
        return (1.0,)
    # interior nodes: roots of P_{s-1} - P_s on [-1, 1], endpoint +1 appended
    c = np.zeros(n_cp + 1)
    c[n_cp - 1] = 1.0
    c[n_cp] = -1.0
    roots = legendre.legroots(c)
    interior = np.sort(roots[np.abs(roots - 1.0) > 1e-9])
    pts = np.concatenate([(interior + 1.0) / 2.0, [1.0]])
    return tuple(float(t) for t in pts)


def lagrange_derivative_matrix(points) -> np.ndarray:
    """Derivatives of the Lagrange basis at the collocation points.

    ``points`` are the interpolation nodes: the element-start anchor 0
    followed by the collocation points.  Returns D with
    D[k-1][j] = dl_j/dtau at node k (k = 1..N_cp, j = 0..N_cp).
    Every row sums to zero (derivative of the constant-one function).
    """
    pts = np.asarray(points, float)
    if abs(pts[0]) > 1e-14:
        raise ValueError("first interpolation node must be 0")
    if len(np.unique(pts)) != pts.size:
        raise ValueError("interpolation nodes must be distinct")
    n = pts.size
    d = np.empty((n - 1, n))
    for row, k in enumerate(range(1, n)):
        tk = pts[k]
        for j in range(n):
            if j == k:
                d[row, j] = sum(1.0 / (tk - pts[m]) for m in range(n) if m != j)
            else:
                num = 1.0
                for m in range(n):
                    if m != j and m != k:
                        num *= tk - pts[m]
                den = 1.0
                for m in range(n):
                    if m != j:
                        den *= pts[j] - pts[m]
                d[row, j] = num / den
    return d


def lagrange_basis_values(points, tau: float) -> np.ndarray:
    """Values of each Lagrange basis polynomial at scaled time ``tau``."""
    pts = np.asarray(points, float)
    n = pts.size
    vals = np.empty(n)
    for j in range(n):
        prod = 1.0
        for m in range(n):
            if m != j:
                prod *= (tau - pts[m]) / (pts[j] - pts[m])
        vals[j] = prod
    return vals


@dataclass(frozen=True)
class TimeGrids:
    """The three nested discretization grids plus collocation structure.

    ``dt_dis = dt_elec / n1`` and ``dt_cont = dt_dis / n2``; every price
    step starts on a discrete step and every discrete step on an element
    boundary.  ``points`` are the interpolation nodes (0 plus the
    collocation points) on the unit element.
    """

    t0: float
    tf: float
    dt_elec: float
    n1: int
    n2: int
    n_cp: int
    points: tuple

    @property
    def dt_dis(self) -> float:
        return self.dt_elec / self.n1

    @property
    def dt_cont(self) -> float:
        return self.dt_dis / self.n2

    @property
    def horizon(self) -> float:
        return self.tf - self.t0

    @property
    def n_elec(self) -> int:
        return round(self.horizon / self.dt_elec)

    @property
    def n_dis(self) -> int:
        return round(self.horizon / self.dt_dis)

    @property
    def n_elements(self) -> int:
        return round(self.horizon / self.dt_cont)

    def element_start(self, fe: int) -> float:
        return self.t0 + fe * self.dt_cont

    def element_step(self, fe: int) -> int:
        """Discrete-grid step owning element ``fe``."""
        return fe // self.n2

    def step_price_index(self, step: int) -> int:
        """Price-grid interval owning discrete step ``step``."""
        return step // self.n1

    def collocation_times(self, fe: int) -> np.ndarray:
        """Absolute times of the collocation points of element ``fe``."""
        base = self.element_start(fe)
        return base + self.dt_cont * np.asarray(self.points[1:])


def build_grids(dt_elec: float, n1: int, n2: int, n_cp: int, horizon) -> TimeGrids:
    """Construct nested grids; rejects non-integer nesting or tiling."""
    if n1 < 1 or n2 < 1 or int(n1) != n1 or int(n2) != n2:
        raise ValueError("refinement factors n1, n2 must be integers >= 1")
    if dt_elec <= 0:
        raise ValueError("dt_elec must be positive")
    try:
        t0, tf = float(horizon[0]), float(horizon[1])
    except TypeError:
        t0, tf = 0.0, float(horizon)
    span = tf - t0
    n_price = span / dt_elec
    if abs(n_price - round(n_price)) > 1e-9 or round(n_price) < 1:
        raise ValueError("horizon must be an integer number of price steps")
    pts = (0.0,) + radau_points(n_cp)
    return TimeGrids(t0=t0, tf=tf, dt_elec=dt_elec, n1=int(n1), n2=int(n2), n_cp=n_cp, points=pts)


def collocate_linear_ode(model, a_mat, b_mat, c_mat, d_mat, grids: TimeGrids, handles, x_init, name="ode"):
    """Emit collocation + continuity equalities for a constant-matrix ODE.

    The dynamics are dx/dt = A x + B y + C z + D w with y algebraic
    variables at collocation points, z and w piecewise constant on the
    discrete grid.  ``handles`` carries variable ids:

    - ``x``: (n_elements, n_cp + 1, nx) state values at the interpolation
      nodes of each element,
    - ``y``: (n_elements, n_cp, ny) or None,
    - ``z``: (n_dis, nz) or None,
    - ``w``: (n_dis, nw) or None.

    ``x_init`` fixes the anchor of the first element.  States are
    continuous across element boundaries; their first derivatives may
    jump there.
    """
    a_mat = np.atleast_2d(np.asarray(a_mat, float))
    nx = a_mat.shape[0]
    b_mat = None if b_mat is None else np.atleast_2d(np.asarray(b_mat, float))
    c_mat = None if c_mat is None else np.atleast_2d(np.asarray(c_mat, float))
    d_mat = None if d_mat is None else np.atleast_2d(np.asarray(d_mat, float))
    dmat = lagrange_derivative_matrix(grids.points)
    x_h = handles["x"]
    y_h = handles.get("y")
    z_h = handles.get("z")
    w_h = handles.get("w")
    inv_dt = 1.0 / grids.dt_cont

    for ix in range(nx):
        model.add_constraint([(x_h[0][0][ix], 1.0)], "==", float(x_init[ix]), name=f"{name}_ic{ix}")

    for fe in range(grids.n_elements):
        step = grids.element_step(fe)
        if fe > 0:
            for ix in range(nx):
                model.add_constraint(
                    [(x_h[fe - 1][grids.n_cp][ix], 1.0), (x_h[fe][0][ix], -1.0)],
                    "==",
                    0.0,
                    name=f"{name}_cont{fe}_{ix}",
                )
        for k in range(1, grids.n_cp + 1):
            for ix in range(nx):
                coeffs = []
                for j in range(grids.n_cp + 1):
                    coeffs.append((x_h[fe][j][ix], inv_dt * dmat[k - 1, j]))
                # right-hand side terms move to the left with negated sign
                for jx in range(nx):
                    if a_mat[ix, jx] != 0.0:
                        coeffs.append((x_h[fe][k][jx], -a_mat[ix, jx]))
                if b_mat is not None and y_h is not None:
                    for jy in range(b_mat.shape[1]):
                        if b_mat[ix, jy] != 0.0:
                            coeffs.append((y_h[fe][k - 1][jy], -b_mat[ix, jy]))
                if c_mat is not None and z_h is not None:
                    for jz in range(c_mat.shape[1]):
                        if c_mat[ix, jz] != 0.0:
                            coeffs.append((z_h[step][jz], -c_mat[ix, jz]))
                if d_mat is not None and w_h is not None:
                    for jw in range(d_mat.shape[1]):
                        if d_mat[ix, jw] != 0.0:
                            coeffs.append((w_h[step][jw], -d_mat[ix, jw]))
                model.add_constraint(coeffs, "==", 0.0, name=f"{name}_col{fe}_{k}_{ix}")
