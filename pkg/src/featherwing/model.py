"""Wing definition, cantilever mode shapes, quadrature, and modal reduction.

The distributed bending/torsion model is reduced to two modal coordinates
(q for bending, r for torsion).  Everything here is a pure function of its
inputs; the resulting coefficient set feeds the state-space dynamics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np

from .errors import DomainError, ModelError, NumericError, ParameterError

# First root of cos(x)*cosh(x) = -1 (clamped-free beam characteristic equation).
CANTILEVER_LAMBDA_1 = 1.8751040687119612
_SIGMA_1 = (np.cosh(CANTILEVER_LAMBDA_1) + np.cos(CANTILEVER_LAMBDA_1)) / (
    np.sinh(CANTILEVER_LAMBDA_1) + np.sin(CANTILEVER_LAMBDA_1)
)

# Relative tolerance for the clamped/free boundary-condition checks.
BC_RTOL = 1e-9


@dataclass(frozen=True)
class WingModel:
    """Geometry, inertia, stiffness and flight condition of the wing.

    All quantities are per the usual straight-wing beam idealization:
    `half_span` is the cantilever length, `linear_mass` and
    `torsion_inertia` are per unit span, `sc_gc_offset` is the distance
    from the stiffness center to the gravity center (positive aft), and
    `sc_position` locates the stiffness center aft of the leading edge.
    """

    half_span: float
    chord: float
    linear_mass: float
    sc_gc_offset: float
    torsion_inertia: float
    bending_stiffness: float
    torsion_stiffness: float
    sc_position: float
    lift_slope: float
    airspeed: float
    air_density: float

    def __post_init__(self):
        positive = {
            "half_span": self.half_span,
            "chord": self.chord,
            "linear_mass": self.linear_mass,
            "torsion_inertia": self.torsion_inertia,
            "bending_stiffness": self.bending_stiffness,
            "torsion_stiffness": self.torsion_stiffness,
        }
        for name, value in positive.items():
            if not np.isfinite(value) or value <= 0:
                raise ParameterError(f"{name} must be positive, got {value}")
        # airspeed/density zero are allowed: they give the conservative limit.
        for name, value in (("airspeed", self.airspeed),
                            ("air_density", self.air_density)):
            if not np.isfinite(value) or value < 0:
                raise ParameterError(f"{name} must be >= 0, got {value}")
        if not (0 < self.sc_position < self.chord):
            raise ParameterError(
                f"sc_position must lie inside the chord (0, {self.chord}), "
                f"got {self.sc_position}"
            )
        if not np.isfinite(self.sc_gc_offset) or not np.isfinite(self.lift_slope):
            raise ParameterError("sc_gc_offset and lift_slope must be finite")


@dataclass(frozen=True)
class ModeShapes:
    """Assumed vibration modes used for the two-coordinate reduction.

    ``bending(z)`` returns ``(f, f', f'', f''')`` and ``torsion(z)`` returns
    ``(phi, phi')``; both accept scalars or arrays on ``[0, length]``.
    """

    length: float
    bending: Callable[[np.ndarray], Tuple[np.ndarray, ...]]
    torsion: Callable[[np.ndarray], Tuple[np.ndarray, ...]]

    def check_boundary_conditions(self) -> None:
        """Verify clamped-root / free-tip conditions to BC_RTOL."""
        l = self.length
        f0, df0, _, _ = self.bending(0.0)
        _, _, ddfl, dddfl = self.bending(l)
        scale2 = max(abs(self.bending(z)[2]) for z in np.linspace(0, l, 21))
        scale3 = max(abs(self.bending(z)[3]) for z in np.linspace(0, l, 21))
        p0, _ = self.torsion(0.0)
        _, dpl = self.torsion(l)
        pscale = max(abs(self.torsion(z)[1]) for z in np.linspace(0, l, 21))
        checks = [
            ("f(0)", f0, 1.0),
            ("f'(0)", df0, 1.0),
            ("f''(l)", ddfl, scale2),
            ("f'''(l)", dddfl, scale3),
            ("phi(0)", p0, 1.0),
            ("phi'(l)", dpl, pscale),
        ]
        for name, value, scale in checks:
            if abs(value) > BC_RTOL * max(scale, 1e-300):
                raise ModelError(
                    f"mode shape violates boundary condition {name}=0 "
                    f"(got {value:.3e}, scale {scale:.3e})"
                )


def _check_span(z, l: float) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(z > l):
        raise DomainError(f"z must lie in [0, {l}]")
    return z


def eval_bending_mode(z, wing: WingModel):
    """First analytic cantilever bending mode and its first three derivatives.

    Uses the classical clamped-free closed form; with this normalization the
    tip value is 2 and the span integral of f**2 equals the half-span.
    """
    l = wing.half_span
    z = _check_span(z, l)
    k = CANTILEVER_LAMBDA_1 / l
    kz = k * z
    ch, co = np.cosh(kz), np.cos(kz)
    sh, si = np.sinh(kz), np.sin(kz)
    f = ch - co - _SIGMA_1 * (sh - si)
    df = k * (sh + si - _SIGMA_1 * (ch - co))
    ddf = k ** 2 * (ch + co - _SIGMA_1 * (sh + si))
    dddf = k ** 3 * (sh - si - _SIGMA_1 * (ch + co))
    return f, df, ddf, dddf


def eval_torsion_mode(z, wing: WingModel):
    """Quarter-sine torsion mode: phi = sin(pi z / 2l), unit tip amplitude."""
    l = wing.half_span
    z = _check_span(z, l)
    w = np.pi / (2.0 * l)
    return np.sin(w * z), w * np.cos(w * z)


def cantilever_modes(wing: WingModel) -> ModeShapes:
    """ModeShapes bundle for the analytic cantilever bending/torsion pair."""
    return ModeShapes(
        length=wing.half_span,
        bending=lambda z: eval_bending_mode(z, wing),
        torsion=lambda z: eval_torsion_mode(z, wing),
    )


def integrate(fn, lo: float, hi: float, panels: int) -> float:
    """Composite Simpson quadrature of ``fn`` on [lo, hi].

    ``panels`` parabolic panels give 2*panels+1 samples.  Deterministic for a
    fixed panel count; no adaptive subdivision.
    """
    if panels < 2:
        raise ParameterError(f"panels must be >= 2, got {panels}")
    if hi < lo:
        raise ParameterError(f"empty interval [{lo}, {hi}]")
    n = 2 * panels
    xs = np.linspace(lo, hi, n + 1)
    try:
        ys = np.asarray(fn(xs), dtype=float)
    except (TypeError, ValueError):
        ys = np.array([float(fn(x)) for x in xs])
    else:
        if ys.shape != xs.shape:  # non-vectorized integrand
            ys = np.array([float(fn(x)) for x in xs])
    if not np.all(np.isfinite(ys)):
        bad = xs[~np.isfinite(ys)][0]
        raise NumericError(f"integrand non-finite at z={bad!r}")
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    h = (hi - lo) / n
    return float(h / 3.0 * np.dot(w, ys))


@dataclass(frozen=True)
class ModalCoefficients:
    """Constants of the reduced two-coordinate equations of motion.

    ``a*``/``b*`` are the modal mass/damping/stiffness constants, ``d*`` the
    entries of the inverted modal mass matrix, and ``C`` the 2x4 state block
    multiplying (x1, x2, x3, x4) in the accelerations.  ``b23_elastic`` keeps
    the velocity-independent (structural) part of ``b23`` separate because
    the energy function needs it.
    """

    a11: float
    a12: float
    a13: float
    a21: float
    a22: float
    b11: float
    b12: float
    b13: float
    b21: float
    b22: float
    b23: float
    b23_elastic: float
    d11: float
    d12: float
    d21: float
    d22: float
    C: np.ndarray = field(repr=False)
    rule: str = "simpson"
    panels: int = 256

    def as_rows(self):
        """(name, value) pairs in a stable order, for the CSV table."""
        rows = [(n, getattr(self, n)) for n in (
            "a11", "a12", "a13", "a21", "a22",
            "b11", "b12", "b13", "b21", "b22", "b23", "b23_elastic",
            "d11", "d12", "d21", "d22")]
        rows += [(f"C{j + 1}{k + 1}", float(self.C[j, k]))
                 for j in range(2) for k in range(4)]
        rows.append(("panels", float(self.panels)))
        return rows


def _fd_derivative(fn_component, z: np.ndarray, l: float, h: float) -> np.ndarray:
    """O(h^2) first derivative of a mode component, one-sided at the ends."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    interior = (z >= h) & (z <= l - h)
    zi = z[interior]
    out[interior] = (fn_component(zi + h) - fn_component(zi - h)) / (2 * h)
    left = z < h
    zl = z[left]
    out[left] = (-3 * fn_component(zl) + 4 * fn_component(zl + h)
                 - fn_component(zl + 2 * h)) / (2 * h)
    right = z > l - h
    zr = z[right]
    out[right] = (3 * fn_component(zr) - 4 * fn_component(zr - h)
                  + fn_component(zr - 2 * h)) / (2 * h)
    return out


def modal_coefficients(wing: WingModel, modes: ModeShapes,
                       panels: int = 256) -> ModalCoefficients:
    """Project the beam equations onto the mode shapes.

    All coefficients are definite integrals over the span, evaluated with
    composite Simpson quadrature.  The modal mass matrix
    [[a11, b11], [a21, b21]] is inverted directly (2x2) to produce the
    ``d`` entries and the state block ``C``; the printed scalar forms of the
    source model are recovered by that inversion where they are consistent.

    The stiffness projections a13 and the elastic part of b23 are computed
    from the literal integrands ((EJ f'')'' f and (GJ phi')' phi, with the
    outer derivative taken by finite differences) and cross-checked against
    their integration-by-parts twins.
    """
    modes.check_boundary_conditions()
    l, b = wing.half_span, wing.chord
    m, sigma = wing.linear_mass, wing.sc_gc_offset
    ej, gj = wing.bending_stiffness, wing.torsion_stiffness
    x0, cya = wing.sc_position, wing.lift_slope
    v, rho = wing.airspeed, wing.air_density

    f = lambda z: modes.bending(z)[0]
    fpp = lambda z: modes.bending(z)[2]
    fppp = lambda z: modes.bending(z)[3]
    phi = lambda z: modes.torsion(z)[0]
    phip = lambda z: modes.torsion(z)[1]

    h_fd = 5e-4 * l
    f4 = lambda z: _fd_derivative(fppp, z, l, h_fd)       # (f''')' = f''''
    phipp = lambda z: _fd_derivative(phip, z, l, h_fd)

    quad = lambda fn: integrate(fn, 0.0, l, panels)

    a11 = quad(lambda z: m * f(z) ** 2)
    a12 = cya * rho * v * quad(lambda z: b * f(z))
    a13 = quad(lambda z: ej * f4(z) * f(z))
    b11 = -quad(lambda z: m * sigma * f(z) * phi(z))
    b12 = -cya * rho * v * quad(lambda z: (0.75 * b - x0) * b * f(z) * phi(z))
    b13 = -cya * rho * v ** 2 * quad(lambda z: b * f(z) * phi(z))
    a21 = -b11
    a22 = -cya * rho * v * quad(lambda z: (x0 - 0.25 * b) * b * f(z) * phi(z))
    b21 = -quad(lambda z: wing.torsion_inertia * phi(z) ** 2)
    b22 = (-(np.pi / 16.0) * rho * v * quad(lambda z: b ** 3 * phi(z) ** 2)
           + cya * rho * v * quad(
               lambda z: b * (x0 - 0.25 * b) * (0.75 * b - x0) * phi(z) ** 2))
    b23_elastic = quad(lambda z: gj * phipp(z) * phi(z))
    b23 = cya * rho * v ** 2 * quad(
        lambda z: b * (x0 - 0.25 * b) * phi(z) ** 2) + b23_elastic

    # Cross-check the finite-differenced stiffness projections against the
    # integration-by-parts forms; disagreement means a broken mode shape.
    a13_ibp = quad(lambda z: ej * fpp(z) ** 2)
    b23_ibp = -quad(lambda z: gj * phip(z) ** 2)
    if abs(a13 - a13_ibp) > 1e-5 * max(abs(a13), 1e-300):
        raise ModelError(
            f"a13 integration-by-parts identity violated: {a13} vs {a13_ibp}")
    if abs(b23_elastic - b23_ibp) > 1e-5 * max(abs(b23_elastic), 1e-300):
        raise ModelError(
            f"b23 integration-by-parts identity violated: "
            f"{b23_elastic} vs {b23_ibp}")

    det = a11 * b21 - b11 * a21
    # det < 0 iff the kinetic form is positive definite (b21 < 0).
    if det >= 0 or abs(det) <= 1e-12 * abs(a11 * b21):
        raise ModelError(
            "modal mass matrix is singular or indefinite "
            f"(sigma_T coupling too large): det={det:.6g}")
    d11, d12 = b21 / det, -b11 / det
    d21, d22 = -a21 / det, a11 / det

    # Rows of the acceleration equations in normal form:
    # xdot2 = C[0] . x + F1,  xdot4 = C[1] . x + F2.
    qcoef = np.array([a13, a12, b13, b12])   # multiplies (x1, x2, x3, x4)
    mcoef = np.array([0.0, a22, b23, b22])
    C = np.vstack([-(d11 * qcoef + d12 * mcoef),
                   -(d21 * qcoef + d22 * mcoef)])

    return ModalCoefficients(
        a11=a11, a12=a12, a13=a13, a21=a21, a22=a22,
        b11=b11, b12=b12, b13=b13, b21=b21, b22=b22, b23=b23,
        b23_elastic=b23_elastic,
        d11=d11, d12=d12, d21=d21, d22=d22,
        C=C, rule="simpson", panels=panels,
    )


def elliptical_torsion_inertia(height: float, chord: float) -> float:
    """Linear mass moment of inertia of an elliptical cross section."""
    return (np.pi * height * chord / 4.0) * height ** 2 * chord ** 2 / (
        4.0 * (height ** 2 + chord ** 2))
