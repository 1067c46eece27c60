"""State-space dynamics, RK4 integration, and the run diagnostics E, L, Ltilde.

State layout: x = (x1, x2, x3, x4) = (q, qdot, r, rdot) for the two modal
coordinates, plus the feather angle vector beta with beta_dot = u.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .control import ControlGains, evaluate_control
from .errors import DivergenceError, ParameterError
from .feathers import FeatherInfluence, FeatherSpec, influence_coeffs
from .model import ModalCoefficients, ModeShapes, WingModel, cantilever_modes, modal_coefficients
from .network import Adjacency, chi_lambda


@dataclass(frozen=True)
class ReducedModel:
    """Assembled plant: modal coefficients plus feather influence arrays."""

    wing: WingModel
    modes: ModeShapes
    coeffs: ModalCoefficients
    feathers: Tuple[FeatherSpec, ...]
    influences: Tuple[FeatherInfluence, ...]
    C: np.ndarray = field(repr=False)        # (2, 4)
    R: np.ndarray = field(repr=False)        # (2, N)
    s: np.ndarray = field(repr=False)        # (2, N)
    beta_lo: np.ndarray = field(repr=False)  # (N,)
    beta_hi: np.ndarray = field(repr=False)  # (N,)

    @property
    def n_feathers(self) -> int:
        return len(self.feathers)

    @property
    def stations(self) -> np.ndarray:
        return np.array([f.span_position for f in self.feathers])


def build_model(wing: WingModel, feathers: Sequence[FeatherSpec],
                panels: int = 256) -> ReducedModel:
    """Build the full reduced model for a wing and its feather layout."""
    modes = cantilever_modes(wing)
    coeffs = modal_coefficients(wing, modes, panels=panels)
    infl = influence_coeffs(feathers, wing, modes, coeffs)
    r = np.array([[f.R1 for f in infl], [f.R2 for f in infl]])
    s = np.array([[f.s1 for f in infl], [f.s2 for f in infl]])
    return ReducedModel(
        wing=wing, modes=modes, coeffs=coeffs,
        feathers=tuple(feathers), influences=tuple(infl),
        C=coeffs.C.copy(), R=r, s=s,
        beta_lo=np.array([f.beta_min for f in feathers]),
        beta_hi=np.array([f.beta_max for f in feathers]),
    )


@dataclass(frozen=True)
class SimState:
    """Phase vector (t, x, beta) at one instant."""

    t: float
    x: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        if x.shape != (4,):
            raise ParameterError(f"x must have shape (4,), got {x.shape}")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(beta))):
            raise ParameterError("state entries must be finite")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "beta", beta)


@dataclass(frozen=True)
class Trajectory:
    """Uniform-step history of one run, including per-step diagnostics."""

    law: str
    dt: float
    t: np.ndarray
    x: np.ndarray          # (n+1, 4)
    beta: np.ndarray       # (n+1, N)
    u: np.ndarray          # (n+1, N)
    energy: np.ndarray
    functional: np.ndarray
    functional_tilde: np.ndarray

    def beta_norms(self) -> np.ndarray:
        return np.linalg.norm(self.beta, axis=1)

    def x_norms(self) -> np.ndarray:
        return np.linalg.norm(self.x, axis=1)


def state_derivative(x: np.ndarray, beta: np.ndarray, u: np.ndarray,
                     model: ReducedModel):
    """Right-hand side of the reduced equations.

    xdot1 = x2, xdot2 = C[0].x + R[0].beta + s[0].u, and likewise for the
    torsion pair; beta_dot = u.  Linear in (x, beta, u).
    """
    x = np.asarray(x, dtype=float)
    beta = np.asarray(beta, dtype=float)
    u = np.asarray(u, dtype=float)
    n = model.n_feathers
    if x.shape != (4,) or beta.shape != (n,) or u.shape != (n,):
        raise ParameterError(
            f"dimension mismatch: x{x.shape}, beta{beta.shape}, u{u.shape}, "
            f"N={n}")
    forcing = model.R @ beta + model.s @ u
    accel = model.C @ x + forcing
    dx = np.array([x[1], accel[0], x[3], accel[1]])
    return dx, u.copy()


def _mask_saturated(u: np.ndarray, beta: np.ndarray,
                    model: ReducedModel) -> np.ndarray:
    """Zero control components that push an angle past an active bound."""
    out = u.copy()
    out[(beta >= model.beta_hi) & (u > 0)] = 0.0
    out[(beta <= model.beta_lo) & (u < 0)] = 0.0
    return out


def rk4_step(state: SimState, model: ReducedModel,
             gains: Optional[ControlGains], dt: float,
             saturate: bool = True) -> SimState:
    """One classical RK4 step; the control law is re-evaluated at each stage.

    With saturation on, stage controls are zeroed in the outward direction at
    active bounds and the angles are clipped to their boxes after the step.
    """
    if dt <= 0:
        raise ParameterError(f"dt must be positive, got {dt}")

    def rhs(x, beta):
        u = evaluate_control(gains, x, beta)
        if saturate:
            u = _mask_saturated(u, beta, model)
        return state_derivative(x, beta, u, model)

    x0, b0 = state.x, state.beta
    k1x, k1b = rhs(x0, b0)
    k2x, k2b = rhs(x0 + 0.5 * dt * k1x, b0 + 0.5 * dt * k1b)
    k3x, k3b = rhs(x0 + 0.5 * dt * k2x, b0 + 0.5 * dt * k2b)
    k4x, k4b = rhs(x0 + dt * k3x, b0 + dt * k3b)
    x = x0 + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
    beta = b0 + dt / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b)
    if saturate:
        beta = np.clip(beta, model.beta_lo, model.beta_hi)
    t = state.t + dt
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(beta))):
        raise DivergenceError(t, float(np.linalg.norm(x[np.isfinite(x)])))
    return SimState(t=t, x=x, beta=beta)


def energy(x: np.ndarray, coeffs: ModalCoefficients) -> float:
    """Total oscillation energy of the reduced model.

    Quadratic in the state: bending strain (a13) and torsion strain
    (-b23_elastic) plus the kinetic form with the sigma_T cross term.
    """
    x1, x2, x3, x4 = (float(v) for v in x)
    return (0.5 * coeffs.a13 * x1 ** 2
            + 0.5 * coeffs.a11 * x2 ** 2
            - 0.5 * coeffs.b23_elastic * x3 ** 2
            - 0.5 * coeffs.b21 * x4 ** 2
            - coeffs.a21 * x2 * x4)


def energy_rate(x: np.ndarray, xdot: np.ndarray,
                coeffs: ModalCoefficients) -> float:
    """Chain-rule time derivative of :func:`energy` along a trajectory."""
    x1, x2, x3, x4 = (float(v) for v in x)
    d2, d4 = float(xdot[1]), float(xdot[3])
    return (coeffs.a13 * x1 * x2
            + coeffs.a11 * x2 * d2
            - coeffs.b23_elastic * x3 * x4
            - coeffs.b21 * x4 * d4
            - coeffs.a21 * (d2 * x4 + x2 * d4))


def functional_value(x: np.ndarray, chi: float, lam: float) -> float:
    x1, x2, x3, x4 = (float(v) for v in x)
    return 0.5 * (chi * (x1 ** 2 + x2 ** 2) + lam * (x3 ** 2 + x4 ** 2))


def functional_rate(x: np.ndarray, xdot: np.ndarray, chi: float,
                    lam: float) -> float:
    x1, x2, x3, x4 = (float(v) for v in x)
    return (chi * (x1 * x2 + x2 * float(xdot[1]))
            + lam * (x3 * x4 + x4 * float(xdot[3])))


def disagreement(beta: np.ndarray, net: Adjacency) -> float:
    """Ordered double sum of b_ij (beta_i - beta_j)^2."""
    beta = np.asarray(beta, dtype=float)
    diff = beta[:, None] - beta[None, :]
    return float(np.sum(net.weights * diff ** 2))


def disagreement_rate(beta: np.ndarray, u: np.ndarray, net: Adjacency) -> float:
    """d/dt of 0.5 * disagreement when beta_dot = u."""
    beta = np.asarray(beta, dtype=float)
    u = np.asarray(u, dtype=float)
    db = beta[:, None] - beta[None, :]
    du = u[:, None] - u[None, :]
    return float(np.sum(net.weights * db * du))


def functional_L(x: np.ndarray, net: Adjacency, modes: ModeShapes,
                 stations: Sequence[float]) -> float:
    """Network deviation functional L(x) = (chi (x1^2+x2^2) + lam (x3^2+x4^2))/2."""
    chi, lam = chi_lambda(net, modes, stations)
    return functional_value(x, chi, lam)


def functional_L_tilde(x: np.ndarray, beta: np.ndarray, net: Adjacency,
                       modes: ModeShapes, stations: Sequence[float]) -> float:
    """L plus half the angle disagreement quadratic."""
    return functional_L(x, net, modes, stations) + 0.5 * disagreement(beta, net)


def simulate(model: ReducedModel, gains: Optional[ControlGains],
             net: Adjacency, init: SimState, dt: float, steps: int,
             saturate: bool = True) -> Trajectory:
    """Integrate the closed (or open, gains=None) loop for ``steps`` steps.

    Deterministic for fixed inputs.  The recorded u row is the control
    actually applied at the start of each step (after saturation masking);
    diagnostics E, L, Ltilde are evaluated at every stored state.
    """
    if steps < 1:
        raise ParameterError(f"steps must be >= 1, got {steps}")
    n = model.n_feathers
    chi, lam = chi_lambda(net, model.modes, model.stations)

    ts = np.empty(steps + 1)
    xs = np.empty((steps + 1, 4))
    betas = np.empty((steps + 1, n))
    us = np.empty((steps + 1, n))
    es = np.empty(steps + 1)
    ls = np.empty(steps + 1)
    lts = np.empty(steps + 1)

    state = init

    def record(k, st):
        ts[k] = st.t
        xs[k] = st.x
        betas[k] = st.beta
        u = evaluate_control(gains, st.x, st.beta)
        if saturate:
            u = _mask_saturated(u, st.beta, model)
        us[k] = u
        es[k] = energy(st.x, model.coeffs)
        ls[k] = functional_value(st.x, chi, lam)
        lts[k] = ls[k] + 0.5 * disagreement(st.beta, net)

    law_name = gains.law if gains is not None else "none"
    record(0, state)
    for k in range(1, steps + 1):
        try:
            state = rk4_step(state, model, gains, dt, saturate=saturate)
        except DivergenceError as exc:
            # Hand the completed rows to the caller for flushing.
            exc.partial = Trajectory(
                law=law_name, dt=dt, t=ts[:k].copy(), x=xs[:k].copy(),
                beta=betas[:k].copy(), u=us[:k].copy(), energy=es[:k].copy(),
                functional=ls[:k].copy(), functional_tilde=lts[:k].copy())
            raise
        record(k, state)

    return Trajectory(
        law=law_name, dt=dt, t=ts, x=xs, beta=betas, u=us,
        energy=es, functional=ls, functional_tilde=lts,
    )
