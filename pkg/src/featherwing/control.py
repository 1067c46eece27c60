"""The three feather control syntheses.

All three laws come from the same recipe: pick a goal function (total
oscillation energy, or a network deviation functional), differentiate it
along trajectories, and set the control proportional to minus its gradient
in u.  The energy law ("sg") and the functional law ("nonma") integrate the
resulting rate once, giving position feedback; the multiagent law ("ma")
keeps velocity feedback and adds a Laplacian consensus term on the feather
angles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import ParameterError
from .feathers import FeatherInfluence
from .model import ModalCoefficients
from .network import Adjacency, consensus_term

LAWS = ("sg", "nonma", "ma")


def sg_gains(coeffs: ModalCoefficients, influences: Sequence[FeatherInfluence]):
    """Energy-law feedback vectors (mu, nu).

    mu_i = a11 s_1i - a21 s_2i couples feather i to the bending rate,
    nu_i = -(a21 s_1i + b21 s_2i) to the torsion rate.
    """
    s1 = np.array([f.s1 for f in influences])
    s2 = np.array([f.s2 for f in influences])
    mu = coeffs.a11 * s1 - coeffs.a21 * s2
    nu = -(coeffs.a21 * s1 + coeffs.b21 * s2)
    return mu, nu


@dataclass(frozen=True)
class ControlGains:
    """Per-feather gains plus the law's precomputed constants."""

    law: str
    gamma: np.ndarray
    s1: np.ndarray = field(repr=False)
    s2: np.ndarray = field(repr=False)
    mu: Optional[np.ndarray] = None       # sg
    nu: Optional[np.ndarray] = None       # sg
    chi: Optional[float] = None           # nonma / ma
    lam: Optional[float] = None           # nonma / ma
    net: Optional[Adjacency] = None       # ma

    def __post_init__(self):
        if self.law not in LAWS:
            raise ParameterError(f"law must be one of {LAWS}, got {self.law!r}")
        if np.any(self.gamma <= 0):
            raise ParameterError("all gains must be positive")

    @property
    def n(self) -> int:
        return len(self.gamma)


def build_gains(law: str, gamma, coeffs: ModalCoefficients,
                influences: Sequence[FeatherInfluence],
                net: Optional[Adjacency] = None,
                chi: Optional[float] = None,
                lam: Optional[float] = None) -> ControlGains:
    """Assemble a ControlGains record for one law.

    ``gamma`` may be a scalar or a per-feather sequence.  ``chi``/``lam``
    (and ``net`` for the multiagent law) are required for the functional
    laws; pass the values from :func:`featherwing.network.chi_lambda`.
    """
    n = len(influences)
    gamma = np.broadcast_to(np.asarray(gamma, dtype=float), (n,)).copy()
    s1 = np.array([f.s1 for f in influences])
    s2 = np.array([f.s2 for f in influences])
    if law == "sg":
        mu, nu = sg_gains(coeffs, influences)
        return ControlGains(law=law, gamma=gamma, s1=s1, s2=s2, mu=mu, nu=nu)
    if chi is None or lam is None:
        raise ParameterError(f"law {law!r} needs chi and lambda")
    if law == "nonma":
        return ControlGains(law=law, gamma=gamma, s1=s1, s2=s2, chi=chi, lam=lam)
    if law == "ma":
        if net is None:
            raise ParameterError("multiagent law needs the adjacency")
        if net.n != n:
            raise ParameterError(f"adjacency size {net.n} != feather count {n}")
        return ControlGains(law=law, gamma=gamma, s1=s1, s2=s2,
                            chi=chi, lam=lam, net=net)
    raise ParameterError(f"unknown law {law!r}")


def control_sg(x: np.ndarray, gains: ControlGains) -> np.ndarray:
    """Energy law: u_i = -gamma_i (mu_i x1 + nu_i x3)."""
    if gains.law != "sg":
        raise ParameterError(f"gains are for law {gains.law!r}")
    return -gains.gamma * (gains.mu * x[0] + gains.nu * x[2])


def control_nonma(x: np.ndarray, gains: ControlGains) -> np.ndarray:
    """Functional law: u_i = -gamma_i (chi s_1i x1 + lambda s_2i x3)."""
    if gains.law != "nonma":
        raise ParameterError(f"gains are for law {gains.law!r}")
    return -gains.gamma * (gains.chi * gains.s1 * x[0] + gains.lam * gains.s2 * x[2])


def control_ma(x: np.ndarray, beta: np.ndarray, gains: ControlGains) -> np.ndarray:
    """Multiagent law: velocity feedback plus neighbor disagreement.

    u_i = -g_i (chi s_1i x2 + lambda s_2i x4) - 2 g_i sum_j b_ij (beta_i - beta_j).
    Feather i needs only the shared modal rates, its own angle, and its
    neighbors' angles.
    """
    if gains.law != "ma":
        raise ParameterError(f"gains are for law {gains.law!r}")
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (gains.n,):
        raise ParameterError(f"beta must have shape ({gains.n},), got {beta.shape}")
    rate_term = gains.chi * gains.s1 * x[1] + gains.lam * gains.s2 * x[3]
    return -gains.gamma * rate_term - 2.0 * gains.gamma * consensus_term(beta, gains.net)


def evaluate_control(gains: Optional[ControlGains], x: np.ndarray,
                     beta: np.ndarray) -> np.ndarray:
    """Dispatch to the law held by ``gains``; None means u = 0."""
    if gains is None:
        return np.zeros(len(beta))
    if gains.law == "sg":
        return control_sg(x, gains)
    if gains.law == "nonma":
        return control_nonma(x, gains)
    return control_ma(x, beta, gains)


def goal_gradient(gains: ControlGains, x: np.ndarray,
                  beta: np.ndarray) -> np.ndarray:
    """Gradient in u of the law's goal-function rate.

    For "sg" this is mu x2 + nu x4 (energy rate), for "nonma"
    chi s1 x2 + lambda s2 x4 (deviation functional rate), and for "ma" the
    same plus twice the consensus disagreement.  Each law's synthesized rate
    (or, for "ma", u itself) equals -gamma times this vector, so the descent
    product <gradient, -gamma*gradient> is -sum gamma_i g_i^2 <= 0.
    """
    if gains.law == "sg":
        return gains.mu * x[1] + gains.nu * x[3]
    grad = gains.chi * gains.s1 * x[1] + gains.lam * gains.s2 * x[3]
    if gains.law == "ma":
        grad = grad + 2.0 * consensus_term(np.asarray(beta, dtype=float), gains.net)
    return grad


def feedback_matrix(gains: ControlGains, n_states: int = 4) -> np.ndarray:
    """Linear feedback K with u = K [x; beta], for closed-loop assembly."""
    n = gains.n
    k = np.zeros((n, n_states + n))
    g = gains.gamma
    if gains.law == "sg":
        k[:, 0] = -g * gains.mu
        k[:, 2] = -g * gains.nu
    elif gains.law == "nonma":
        k[:, 0] = -g * gains.chi * gains.s1
        k[:, 2] = -g * gains.lam * gains.s2
    else:  # ma
        k[:, 1] = -g * gains.chi * gains.s1
        k[:, 3] = -g * gains.lam * gains.s2
        k[:, n_states:] = -2.0 * g[:, None] * gains.net.laplacian()
    return k
