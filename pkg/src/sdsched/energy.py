"""Energy-conversion components: exact curves, affine segments, constraints.

Compression chillers follow a cubic part-load COP correlation, CHPs a
quadratic part-load efficiency pair, the electric boiler a constant
efficiency.  For the MILP, input-power curves become piecewise-affine
segments over the load range above minimum part load; chiller curves are
convex there, so the segments need no extra binaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

COP_POLY = (0.0126, 3.679, -3.5494, 0.8615)  # ascending powers


@dataclass(frozen=True)
class ChillerParams:
    name: str
    Q_max: float  # nominal cooling power (MJ/h)
    COP_nom: float
    min_part_load: float = 0.2
    pwa_breakpoint: float = 0.7

    @property
    def Q_min(self) -> float:
        return self.min_part_load * self.Q_max


def default_chillers():
    """The three-chiller fleet: base load, medium, peak."""
    return (
        ChillerParams("CC1", 4.8, 6.0),
        ChillerParams("CC2", 2.3, 4.5),
        ChillerParams("CC3", 1.5, 3.0),
    )


def chiller_cop(q, p: ChillerParams):
    """COP at part-load fraction ``q`` (valid between min load and 1)."""
    q = np.asarray(q, float)
    if np.any(q < p.min_part_load - 1e-12) or np.any(q > 1.0 + 1e-12):
        raise ValueError(f"part load {q} outside [{p.min_part_load}, 1]")
    c0, c1, c2, c3 = COP_POLY
    val = p.COP_nom * (c0 + c1 * q + c2 * q * q + c3 * q * q * q)
    return float(val) if val.ndim == 0 else val


def chiller_input_power(Q, p: ChillerParams):
    """Exact electric input for cooling output ``Q``; off state draws zero."""
    if Q == 0.0:
        return 0.0
    if Q < p.Q_min - 1e-9 or Q > p.Q_max + 1e-9:
        raise ValueError(f"cooling load {Q} outside 0 or [{p.Q_min}, {p.Q_max}]")
    return Q / chiller_cop(Q / p.Q_max, p)


@dataclass(frozen=True)
class ChpParams:
    name: str
    Q_nom_th: float  # kW thermal
    min_part_load: float = 0.5

    @property
    def eta_nom_th(self) -> float:
        return -3.55e-5 * self.Q_nom_th + 0.498

    @property
    def eta_nom_el(self) -> float:
        return 3.55e-5 * self.Q_nom_th + 0.372

    @property
    def Q_min(self) -> float:
        return self.min_part_load * self.Q_nom_th


def default_chps():
    return (ChpParams("CHP1", 800.0), ChpParams("CHP2", 500.0))


def chp_part_load_eta(q, p: ChpParams):
    """(thermal, electric) efficiency at part-load fraction ``q``."""
    eta_th = p.eta_nom_th * (1.0960 - 0.0199 * q - 0.0768 * q * q)
    eta_el = p.eta_nom_el * (0.5868 + 0.6743 * q - 0.2611 * q * q)
    return eta_th, eta_el


def chp_curves(Q_th, p: ChpParams):
    """(fuel input kW, electric output kW) at thermal output ``Q_th``."""
    if Q_th < p.Q_min - 1e-9 or Q_th > p.Q_nom_th + 1e-9:
        raise ValueError(f"thermal load {Q_th} outside [{p.Q_min}, {p.Q_nom_th}]")
    q = Q_th / p.Q_nom_th
    eta_th, eta_el = chp_part_load_eta(q, p)
    fuel = Q_th / eta_th
    return fuel, fuel * eta_el


@dataclass(frozen=True)
class BoilerParams:
    name: str = "EB"
    P_nom: float = 800.0  # kW thermal
    efficiency: float = 0.99
    min_part_load: float = 0.2

    @property
    def Q_min(self) -> float:
        return self.min_part_load * self.P_nom


def boiler_input_power(Q_th, p: BoilerParams):
    if Q_th == 0.0:
        return 0.0
    if Q_th < p.Q_min - 1e-9 or Q_th > p.P_nom + 1e-9:
        raise ValueError(f"thermal load {Q_th} outside 0 or [{p.Q_min}, {p.P_nom}]")
    return Q_th / p.efficiency


@dataclass(frozen=True)
class PwaSegments:
    """Affine input-power model over the on-range of one component.

    output = Q_min*z + sum(y_s), input = P_min*z + sum(m_s * y_s) with
    0 <= y_s <= width_s.  Slopes must be non-decreasing so that an LP fills
    segments in order without segment binaries.
    """

    Q_min: float
    Q_max: float
    P_min: float  # input power at minimum load
    slopes: tuple
    widths: tuple

    def evaluate(self, Q):
        """PWA input power at output ``Q`` (0 when off)."""
        if Q == 0.0:
            return 0.0
        if Q < self.Q_min - 1e-9 or Q > self.Q_max + 1e-9:
            raise ValueError(f"load {Q} outside [{self.Q_min}, {self.Q_max}]")
        rest = min(max(Q - self.Q_min, 0.0), sum(self.widths))
        p = self.P_min
        for mslope, w in zip(self.slopes, self.widths):
            take = min(rest, w)
            p += mslope * take
            rest -= take
        return p


def build_pwa(exact, q_min, q_max, breakpoints) -> PwaSegments:
    """Chord-interpolation segments of an exact input-power curve.

    ``breakpoints`` are interior output levels; the segments connect the
    exact curve at (q_min, *breakpoints, q_max).  Raises if the chord
    slopes decrease (a non-convex curve would need segment binaries).
    """
    knots = [q_min, *sorted(breakpoints), q_max]
    if len(set(knots)) != len(knots):
        raise ValueError("breakpoints must be distinct and inside the load range")
    vals = [exact(k) for k in knots]
    slopes = []
    widths = []
    for a, b, fa, fb in zip(knots[:-1], knots[1:], vals[:-1], vals[1:]):
        slopes.append((fb - fa) / (b - a))
        widths.append(b - a)
    for s0, s1 in zip(slopes[:-1], slopes[1:]):
        if s1 < s0 - 1e-9:
            raise ValueError("input-power curve is not convex over the load range")
    return PwaSegments(Q_min=q_min, Q_max=q_max, P_min=vals[0], slopes=tuple(slopes), widths=tuple(widths))


def chiller_pwa(p: ChillerParams) -> PwaSegments:
    return build_pwa(
        lambda q: chiller_input_power(q, p),
        p.Q_min,
        p.Q_max,
        [p.pwa_breakpoint * p.Q_max],
    )


def chp_fuel_pwa(p: ChpParams) -> PwaSegments:
    """Single-segment fuel-input model between minimum and full load."""
    return build_pwa(lambda q: chp_curves(q, p)[0], p.Q_min, p.Q_nom_th, [])


def chp_electric_pwa(p: ChpParams) -> PwaSegments:
    """Single-segment electric-output model (affine in thermal output)."""
    return build_pwa(lambda q: chp_curves(q, p)[1], p.Q_min, p.Q_nom_th, [])


def boiler_pwa(p: BoilerParams) -> PwaSegments:
    return build_pwa(lambda q: boiler_input_power(q, p), p.Q_min, p.P_nom, [])


def pwa_max_relative_error(exact, pwa: PwaSegments, n=400):
    """Largest |pwa - exact| / exact over the on-range."""
    qs = np.linspace(pwa.Q_min, pwa.Q_max, n)
    worst = 0.0
    for q in qs:
        e = exact(float(q))
        worst = max(worst, abs(pwa.evaluate(float(q)) - e) / abs(e))
    return worst


@dataclass(frozen=True)
class ComponentSpec:
    """Everything the MILP builder needs for one dispatchable component.

    ``electric_sign`` +1 for consumers (chillers, boiler), -1 for
    producers (CHP electric output is revenue at the electricity price).
    ``fuel`` is a second PWA on the same output variable, priced at the
    gas price (CHPs only).
    """

    name: str
    pwa: PwaSegments
    electric_sign: float = 1.0
    fuel: PwaSegments | None = None
    min_up_steps: int = 0
    min_down_steps: int = 0


def component_constraints(component, grids=None, min_up_down_steps=0) -> ComponentSpec:
    """Constraint spec for one component on the discrete decision grid.

    Chillers and the boiler consume electricity; CHPs produce electricity
    and consume fuel.  ``min_up_down_steps`` applies the same minimum
    up-time and down-time in discrete steps.
    """
    if isinstance(component, ChillerParams):
        return ComponentSpec(
            name=component.name,
            pwa=chiller_pwa(component),
            min_up_steps=min_up_down_steps,
            min_down_steps=min_up_down_steps,
        )
    if isinstance(component, ChpParams):
        return ComponentSpec(
            name=component.name,
            pwa=chp_electric_pwa(component),
            electric_sign=-1.0,
            fuel=chp_fuel_pwa(component),
            min_up_steps=min_up_down_steps,
            min_down_steps=min_up_down_steps,
        )
    if isinstance(component, BoilerParams):
        return ComponentSpec(
            name=component.name,
            pwa=boiler_pwa(component),
            min_up_steps=min_up_down_steps,
            min_down_steps=min_up_down_steps,
        )
    raise TypeError(f"unsupported component {type(component)!r}")
