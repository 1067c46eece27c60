"""Linear stability analysis: system matrices, spectra, and the flutter search."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .control import ControlGains, feedback_matrix
from .dynamics import ReducedModel
from .errors import BracketError, NumericError, ParameterError

@dataclass(frozen=True)
class SystemMatrix:
    """Dense LTI matrix of the open (4x4) or closed (4+N) loop."""

    matrix: np.ndarray = field(repr=False)
    airspeed: float = float("nan")
    law: str = "none"

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def assemble(model: ReducedModel,
             gains: Optional[ControlGains] = None) -> SystemMatrix:
    """Assemble the LTI matrix of the model under a linear law.

    Open loop (gains=None): the 4x4 block acting on x with beta frozen at
    zero.  Closed loop: states (x, beta); the acceleration rows gain the
    R + s·K contributions and the beta rows are the feedback matrix itself.
    Saturation is ignored (linear analysis).
    """
    c = model.C
    if gains is None:
        a = np.zeros((4, 4))
        a[0, 1] = 1.0
        a[2, 3] = 1.0
        a[1, :] = c[0]
        a[3, :] = c[1]
        return SystemMatrix(matrix=a, airspeed=model.wing.airspeed, law="none")
    n = model.n_feathers
    if gains.n != n:
        raise ParameterError(f"gains size {gains.n} != feather count {n}")
    k = feedback_matrix(gains)                    # (N, 4+N)
    a = np.zeros((4 + n, 4 + n))
    a[0, 1] = 1.0
    a[2, 3] = 1.0
    a[1, :4] = c[0]
    a[3, :4] = c[1]
    a[1, 4:] = model.R[0]
    a[3, 4:] = model.R[1]
    a[1, :] += model.s[0] @ k
    a[3, :] += model.s[1] @ k
    a[4:, :] = k
    return SystemMatrix(matrix=a, airspeed=model.wing.airspeed, law=gains.law)


def spectral_abscissa(system) -> float:
    """Maximum real part over the eigenvalues (dense QR iteration)."""
    a = system.matrix if isinstance(system, SystemMatrix) else np.asarray(system, dtype=float)
    if not np.all(np.isfinite(a)):
        raise NumericError("system matrix has non-finite entries")
    try:
        eig = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigenvalue iteration failed: {exc}") from exc
    return float(np.max(eig.real))


def mode_frequencies(system) -> np.ndarray:
    """Nonnegative oscillation frequencies (Hz), one per conjugate pair.

    Real eigenvalues contribute zeros, so the column count is dim//2 for any
    matrix of the same size.
    """
    a = system.matrix if isinstance(system, SystemMatrix) else np.asarray(system, dtype=float)
    eig = np.linalg.eigvals(a)
    pos = np.sort(eig.imag[eig.imag > 0])[::-1] / (2.0 * np.pi)
    out = np.zeros(a.shape[0] // 2)
    out[: len(pos)] = pos[: len(out)]
    return out


@dataclass(frozen=True)
class FlutterSearchResult:
    v_flat: float
    history: Tuple[Tuple[float, float, float], ...]  # (v_lo, v_hi, absc(mid))
    abscissa_lo: float
    abscissa_hi: float


def find_flutter_speed(build: Callable[[float], SystemMatrix], v_lo: float,
                       v_hi: float, tol: float) -> FlutterSearchResult:
    """Bisection on the sign of the spectral abscissa over airspeed.

    ``build`` maps an airspeed to the system matrix at that speed.  Requires
    abscissa(v_lo) < 0 <= abscissa(v_hi); bisects until the bracket width is
    at most ``tol``.
    """
    if not (v_lo < v_hi):
        raise BracketError(f"degenerate bracket [{v_lo}, {v_hi}]")
    if tol <= 0:
        raise ParameterError(f"tol must be positive, got {tol}")
    a_lo = spectral_abscissa(build(v_lo))
    a_hi = spectral_abscissa(build(v_hi))
    if not (a_lo < 0 <= a_hi):
        raise BracketError(
            f"no abscissa sign change on [{v_lo}, {v_hi}]: "
            f"abscissa({v_lo})={a_lo:.6e}, abscissa({v_hi})={a_hi:.6e}")
    lo, hi = v_lo, v_hi
    history: List[Tuple[float, float, float]] = []
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        a_mid = spectral_abscissa(build(mid))
        history.append((lo, hi, a_mid))
        if a_mid < 0:
            lo = mid
        else:
            hi = mid
    return FlutterSearchResult(
        v_flat=0.5 * (lo + hi), history=tuple(history),
        abscissa_lo=a_lo, abscissa_hi=a_hi)


def abscissa_sweep(build: Callable[[float], SystemMatrix],
                   v_grid: np.ndarray) -> np.ndarray:
    """Spectral abscissa over a grid of airspeeds."""
    return np.array([spectral_abscissa(build(v)) for v in np.asarray(v_grid)])


def bracket_from_sweep(v_grid: np.ndarray,
                       abscissas: np.ndarray) -> Optional[Tuple[float, float]]:
    """First (stable, unstable) grid interval, or None if no sign change."""
    sign = abscissas >= 0
    for i in range(len(v_grid) - 1):
        if not sign[i] and sign[i + 1]:
            return float(v_grid[i]), float(v_grid[i + 1])
    return None


def fit_growth_rate(t: np.ndarray, norms: np.ndarray,
                    window: Tuple[float, float] = (0.5, 1.0)) -> float:
    """Least-squares slope of log|x| over a fractional window of the run."""
    t = np.asarray(t, dtype=float)
    norms = np.asarray(norms, dtype=float)
    if np.any(norms <= 0):
        raise NumericError("state norms must be positive to fit a growth rate")
    lo = int(window[0] * (len(t) - 1))
    hi = int(window[1] * (len(t) - 1)) + 1
    if hi - lo < 2:
        raise ParameterError("fit window too narrow")
    slope, _ = np.polyfit(t[lo:hi], np.log(norms[lo:hi]), 1)
    return float(slope)
