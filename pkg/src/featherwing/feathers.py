"""Per-feather aerodynamic factors and their modal projections.

Each feather is a small rigid chordwise strip.  Its chordwise extent is
described in the usual thin-airfoil angular coordinate psi, where
x = b/2 (1 - cos psi) maps the chord to [0, pi].  Deflecting a feather
produces incremental lift and pitching moment proportional to the angle and
its rate; projecting those on the mode shapes yields the state-space
influence coefficients R (from the angle) and s (from the rate).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from .errors import DomainError, ParameterError
from .model import ModalCoefficients, ModeShapes, WingModel, integrate

FOOTPRINT_PANELS = 64


def psi_from_x(x: float, chord: float) -> float:
    """Angular chordwise coordinate of the point x aft of the leading edge."""
    if not 0.0 <= x <= chord:
        raise DomainError(f"x must lie in [0, {chord}], got {x}")
    return float(np.arccos(1.0 - 2.0 * x / chord))


def x_from_psi(psi: float, chord: float) -> float:
    return 0.5 * chord * (1.0 - np.cos(psi))


def shape_factors(psi_star: float, psi_k: float):
    """Dimensionless chordwise factors (G, H, I, J) of a feather strip.

    Evaluated exactly as printed in the source model; all four vanish for a
    zero-width strip (psi_star == psi_k).
    """
    if not (0.0 <= psi_star <= psi_k <= np.pi):
        raise ParameterError(
            f"need 0 <= psi_star <= psi_k <= pi, got ({psi_star}, {psi_k})")
    dpsi = psi_k - psi_star
    dsin = np.sin(psi_k) - np.sin(psi_star)
    dsin2 = np.sin(2 * psi_k) - np.sin(2 * psi_star)
    dsin3 = np.sin(3 * psi_k) - np.sin(3 * psi_star)
    cs = np.cos(psi_star)
    g = (dpsi - dsin) / np.pi
    h = (cs * dpsi - dsin) / (2 * np.pi) - cs * dsin + 0.5 * (dpsi + 0.5 * dsin2)
    i = (2.0 * dsin + dsin2) / 8.0
    j = (-(-2.0 * cs * dsin + dpsi) / 16.0
         - ((0.5 - cs) * dsin2) / 16.0
         - (dsin + dsin3 / 3.0) / 16.0)
    return float(g), float(h), float(i), float(j)


@dataclass(frozen=True)
class FeatherSpec:
    """Placement, chordwise extent, side and angle bounds of one feather."""

    index: int
    span_position: float
    psi_star: float
    psi_k: float
    side: str                      # "lower" or "upper"
    beta_min: float
    beta_max: float
    psi_bar: Optional[float] = None  # informational station from the source data

    def __post_init__(self):
        if self.side not in ("lower", "upper"):
            raise ParameterError(f"side must be 'lower' or 'upper', got {self.side!r}")
        if not (0.0 <= self.psi_star <= self.psi_k <= np.pi):
            raise ParameterError(
                f"need 0 <= psi_star <= psi_k <= pi, got "
                f"({self.psi_star}, {self.psi_k})")
        if self.span_position < 0:
            raise DomainError(f"span_position must be >= 0, got {self.span_position}")
        if self.side == "lower":
            if not (self.beta_min == 0.0 and self.beta_max > 0.0):
                raise ParameterError(
                    f"lower-side feather needs bounds [0, b+] with b+ > 0, "
                    f"got [{self.beta_min}, {self.beta_max}]")
        else:
            if not (self.beta_max == 0.0 and self.beta_min < 0.0):
                raise ParameterError(
                    f"upper-side feather needs bounds [b-, 0] with b- < 0, "
                    f"got [{self.beta_min}, {self.beta_max}]")

    @classmethod
    def from_chordwise(cls, index: int, span_position: float, x_star: float,
                       x_k: float, side: str, chord: float,
                       beta_limit: float, psi_bar: Optional[float] = None
                       ) -> "FeatherSpec":
        """Build a spec from chordwise extents (joint and trailing edge)."""
        if x_star > x_k:
            raise ParameterError(f"x_star ({x_star}) must not exceed x_k ({x_k})")
        if beta_limit <= 0:
            raise ParameterError(f"beta_limit must be positive, got {beta_limit}")
        lo, hi = ((0.0, beta_limit) if side == "lower" else (-beta_limit, 0.0))
        return cls(index=index, span_position=span_position,
                   psi_star=psi_from_x(x_star, chord),
                   psi_k=psi_from_x(x_k, chord),
                   side=side, beta_min=lo, beta_max=hi, psi_bar=psi_bar)


@dataclass(frozen=True)
class FeatherInfluence:
    """Aerodynamic factors of one feather and their modal projections."""

    index: int
    G: float
    H: float
    I: float
    J: float
    A: float
    B: float
    C: float
    D: float
    A_bar: float
    B_bar: float
    C_bar: float
    D_bar: float
    R1: float
    s1: float
    R2: float
    s2: float

    def as_rows(self):
        i = self.index
        return [(f"R_1{i}", self.R1), (f"s_1{i}", self.s1),
                (f"R_2{i}", self.R2), (f"s_2{i}", self.s2)]


def feather_coeffs(spec: FeatherSpec, wing: WingModel):
    """Force/moment coefficients (A, B, C, D) of a feather on this wing.

    A and B scale the lift from the angle and its rate; C and D the pitching
    moment about the stiffness center, which sits x0/b - 1/4 chords aft of
    the quarter-chord aerodynamic center.
    """
    g, h, i, j = shape_factors(spec.psi_star, spec.psi_k)
    b, rho, cya, x0 = wing.chord, wing.air_density, wing.lift_slope, wing.sc_position
    arm = x0 / b - 0.25
    a = cya * g * rho * b ** 2
    bb = cya * h * rho * b ** 3
    c = -(i + cya * arm * g) * rho * b ** 2
    d = -(j + cya * arm * h) * rho * b ** 3
    return a, bb, c, d


def influence_coeffs(specs: Sequence[FeatherSpec], wing: WingModel,
                     modes: ModeShapes, coeffs: ModalCoefficients,
                     panels: int = FOOTPRINT_PANELS) -> List[FeatherInfluence]:
    """Modal projections and state-space influence coefficients of all feathers.

    Each feather force is spread uniformly over a spanwise footprint of width
    l/N centered at its station (clipped to the span), so the projection of
    A_i is A_i times the footprint integral of the mode shape.  R rows carry
    the V^2 (angle) terms, s rows the V (rate) terms, both mapped through the
    inverse modal mass matrix d.
    """
    if not specs:
        return []
    l, v = wing.half_span, wing.airspeed
    n = len(specs)
    width = l / n
    out = []
    for spec in specs:
        if not (0.0 <= spec.span_position <= l):
            raise DomainError(
                f"feather {spec.index} footprint outside [0, {l}] "
                f"(station {spec.span_position})")
        lo = max(0.0, spec.span_position - width / 2.0)
        hi = min(l, spec.span_position + width / 2.0)
        g, h, i, j = shape_factors(spec.psi_star, spec.psi_k)
        a, bb, c, d = feather_coeffs(spec, wing)
        if hi > lo:
            f_int = integrate(lambda z: modes.bending(z)[0], lo, hi, panels)
            phi_int = integrate(lambda z: modes.torsion(z)[0], lo, hi, panels)
        else:
            f_int = phi_int = 0.0
        a_bar, b_bar = a * f_int, bb * f_int
        c_bar, d_bar = c * phi_int, d * phi_int
        out.append(FeatherInfluence(
            index=spec.index, G=g, H=h, I=i, J=j, A=a, B=bb, C=c, D=d,
            A_bar=a_bar, B_bar=b_bar, C_bar=c_bar, D_bar=d_bar,
            R1=v ** 2 * (a_bar * coeffs.d11 + c_bar * coeffs.d12),
            s1=v * (b_bar * coeffs.d11 + d_bar * coeffs.d12),
            R2=v ** 2 * (a_bar * coeffs.d21 + c_bar * coeffs.d22),
            s2=v * (b_bar * coeffs.d21 + d_bar * coeffs.d22),
        ))
    return out
