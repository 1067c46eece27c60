"""Feather communication topology and the functional weights chi, lambda."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple

import numpy as np

from .errors import ParameterError
from .model import ModeShapes

SYMMETRY_ATOL = 1e-15


@dataclass(frozen=True)
class Adjacency:
    """Symmetric nonnegative weight table of the feather network.

    Weights are zero on the diagonal and zero exactly where two feathers are
    not connected.  Row sums equal 1 only on regular topologies (ring,
    complete); Metropolis weights keep them <= 1 elsewhere.
    """

    n: int
    weights: np.ndarray = field(repr=False)
    kind: str = "explicit"

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.n, self.n):
            raise ParameterError(f"weights must be {self.n}x{self.n}, got {w.shape}")
        if np.any(w < 0):
            raise ParameterError("weights must be nonnegative")
        if np.any(np.abs(np.diagonal(w)) > 0):
            raise ParameterError("self-weights must be zero")
        if not np.array_equal(w, w.T):
            raise ParameterError("weights must be symmetric")
        object.__setattr__(self, "weights", w)

    def neighbors(self, i: int) -> np.ndarray:
        return np.nonzero(self.weights[i] > 0)[0]

    def row_sums(self) -> np.ndarray:
        return self.weights.sum(axis=1)

    def laplacian(self) -> np.ndarray:
        return np.diag(self.row_sums()) - self.weights


def _metropolis(n: int, edges: Iterable[Tuple[int, int]]) -> np.ndarray:
    w = np.zeros((n, n))
    edges = list(edges)
    deg = np.zeros(n, dtype=int)
    for i, j in edges:
        deg[i] += 1
        deg[j] += 1
    for i, j in edges:
        w[i, j] = w[j, i] = 1.0 / (1.0 + max(deg[i], deg[j]))
    return w


def build_topology(kind: str, n: int, k: int = 1,
                   weights: Sequence[Tuple[int, int, float]] | None = None
                   ) -> Adjacency:
    """Construct a standard symmetric topology over n feathers.

    ``ring`` and ``complete`` are regular and get exact row normalization;
    ``path`` and ``k_nearest`` use symmetric Metropolis weights
    1/(1 + max(deg_i, deg_j)).  ``explicit`` takes (i, j, w) triples; entries
    given in one direction are mirrored, conflicting duplicates are rejected.
    """
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if n == 1:
        return Adjacency(n=1, weights=np.zeros((1, 1)), kind=kind)

    if kind == "path":
        w = _metropolis(n, ((i, i + 1) for i in range(n - 1)))
    elif kind == "k_nearest":
        if k < 1:
            raise ParameterError(f"k must be >= 1, got {k}")
        edges = [(i, j) for i in range(n) for j in range(i + 1, min(n, i + k + 1))]
        w = _metropolis(n, edges)
    elif kind == "ring":
        if n < 3:
            raise ParameterError("ring needs n >= 3")
        w = np.zeros((n, n))
        for i in range(n):
            w[i, (i + 1) % n] = w[(i + 1) % n, i] = 0.5
    elif kind == "complete":
        w = np.full((n, n), 1.0 / (n - 1))
        np.fill_diagonal(w, 0.0)
    elif kind == "explicit":
        if weights is None:
            raise ParameterError("explicit topology needs (i, j, w) triples")
        w = np.zeros((n, n))
        seen = {}
        for i, j, wij in weights:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise ParameterError(f"bad edge ({i}, {j})")
            if wij < 0:
                raise ParameterError(f"negative weight on edge ({i}, {j})")
            key = (min(i, j), max(i, j))
            if key in seen and abs(seen[key] - wij) > SYMMETRY_ATOL:
                raise ParameterError(
                    f"asymmetric duplicate for edge {key}: {seen[key]} vs {wij}")
            seen[key] = wij
            w[i, j] = w[j, i] = wij
    else:
        raise ParameterError(f"unknown topology kind {kind!r}")
    return Adjacency(n=n, weights=w, kind=kind)


def chi_lambda(net: Adjacency, modes: ModeShapes,
               stations: Sequence[float]) -> Tuple[float, float]:
    """Topology constants chi and lambda of the deviation functional.

    Ordered double sums of b_ij (f_i - f_j)^2 and b_ij (phi_i - phi_j)^2 over
    the network; both are nonnegative and vanish when connected feathers all
    sit at stations with equal mode value (the singular case).
    """
    stations = np.asarray(stations, dtype=float)
    if stations.shape != (net.n,):
        raise ParameterError(
            f"need {net.n} stations, got shape {stations.shape}")
    fz = np.asarray(modes.bending(stations)[0], dtype=float)
    pz = np.asarray(modes.torsion(stations)[0], dtype=float)
    df = fz[:, None] - fz[None, :]
    dp = pz[:, None] - pz[None, :]
    chi = float(np.sum(net.weights * df ** 2))
    lam = float(np.sum(net.weights * dp ** 2))
    if net.n > 1 and (chi == 0.0 or lam == 0.0):
        warnings.warn(
            "singular topology: chi or lambda is zero (all connected "
            "feathers share a mode value)", stacklevel=2)
    return chi, lam


def consensus_term(beta: np.ndarray, net: Adjacency) -> np.ndarray:
    """Laplacian disagreement vector: entry i is sum_j b_ij (beta_i - beta_j)."""
    beta = np.asarray(beta, dtype=float)
    if beta.shape != (net.n,):
        raise ParameterError(f"beta must have shape ({net.n},), got {beta.shape}")
    return net.laplacian() @ beta
