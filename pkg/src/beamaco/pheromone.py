"""Pheromone state, the edge desirability weight and the Elitist / MMAS update rules."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .instance import DistanceMatrix, Tour

# Integer exponents up to this size are evaluated by repeated multiplication.
_MAX_UNROLLED_EXPONENT = 16


@dataclass(frozen=True)
class AcoParams:
    """Hyperparameters shared by all four solvers.

    Defaults are alpha 1, beta 4, evaporation 0.1, deposit 1.0 and MMAS
    bounds 0.1 / 0.9. ``beam_width`` is both the number of extensions per
    partial path and the number of paths kept per ant. ``n_paths=None``
    means ``n_ants * beam_width``.
    """

    alpha: float = 1.0
    beta: float = 4.0
    rho: float = 0.1
    q_deposit: float = 1.0
    tau_min: float = 0.1
    tau_max: float = 0.9
    tau_init: float = 0.5
    n_ants: int = 10
    beam_width: int = 10
    n_paths: int | None = None
    eta_epsilon: float = 1e-6

    def __post_init__(self) -> None:
        if not 0.0 < self.rho < 1.0:
            raise ValueError(f"rho must be in (0, 1), got {self.rho}")
        if not 0.0 < self.tau_min <= self.tau_init <= self.tau_max:
            raise ValueError(
                f"need 0 < tau_min <= tau_init <= tau_max, got "
                f"{self.tau_min}, {self.tau_init}, {self.tau_max}"
            )
        if self.q_deposit <= 0:
            raise ValueError(f"q_deposit must be positive, got {self.q_deposit}")
        if self.n_ants < 1 or self.beam_width < 1:
            raise ValueError("n_ants and beam_width must be at least 1")
        if self.n_paths is not None and self.n_paths < 1:
            raise ValueError(f"n_paths must be at least 1, got {self.n_paths}")
        if self.eta_epsilon <= 0:
            raise ValueError(f"eta_epsilon must be positive, got {self.eta_epsilon}")

    @property
    def paths_kept(self) -> int:
        return self.n_paths if self.n_paths is not None else self.n_ants * self.beam_width


class PheromoneMatrix:
    """Full symmetric ``n x n`` pheromone levels; the diagonal is unused and kept at 0.

    The update functions below mutate the matrix in place and return it.
    """

    def __init__(self, tau: np.ndarray):
        tau = np.array(tau, dtype=np.float64)
        if tau.ndim != 2 or tau.shape[0] != tau.shape[1]:
            raise ValueError(f"pheromone matrix must be square, got shape {tau.shape}")
        np.fill_diagonal(tau, 0.0)
        self.tau = tau

    @property
    def n(self) -> int:
        return self.tau.shape[0]

    def copy(self) -> PheromoneMatrix:
        return PheromoneMatrix(self.tau)

    def off_diagonal(self) -> np.ndarray:
        return self.tau[~np.eye(self.n, dtype=bool)]

    def __repr__(self) -> str:
        return f"PheromoneMatrix(n={self.n})"


def init_pheromone(n: int, tau_init: float) -> PheromoneMatrix:
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if tau_init <= 0:
        raise ValueError(f"tau_init must be positive, got {tau_init}")
    return PheromoneMatrix(np.full((n, n), float(tau_init)))


def _power(x, e: float):
    # SIMD pow in numpy differs from libm pow in the last ulp; plain products do not,
    # so scalars and arrays (and rows vs. whole matrices) get identical weights.
    if float(e).is_integer() and 0 <= e <= _MAX_UNROLLED_EXPONENT:
        e = int(e)
        if e == 0:
            return x * 0.0 + 1.0
        out = x
        for _ in range(e - 1):
            out = out * x
        return out
    return np.power(x, e)


def heuristic_weight(tau: float, dist: int, alpha: float, beta: float, eps: float = 1e-6) -> float:
    """Desirability ``tau**alpha * (1 / dist)**beta`` of one edge.

    Zero-length edges (coincident points) use ``eps`` in place of the length.
    """
    inv = 1.0 / max(float(dist), eps)
    return float(_power(float(tau), alpha) * _power(inv, beta))


def heuristic_weights(tau: np.ndarray, dist: np.ndarray, alpha: float, beta: float, eps: float = 1e-6) -> np.ndarray:
    """Elementwise :func:`heuristic_weight`, bit-identical to it for integer exponents."""
    inv = 1.0 / np.maximum(np.asarray(dist, dtype=np.float64), eps)
    return _power(np.asarray(tau, dtype=np.float64), alpha) * _power(inv, beta)


def weight_matrix(P: PheromoneMatrix, dm: DistanceMatrix, params: AcoParams) -> np.ndarray:
    w = heuristic_weights(P.tau, dm.d, params.alpha, params.beta, params.eta_epsilon)
    np.fill_diagonal(w, 0.0)
    return w


def evaporate(P: PheromoneMatrix, rho: float) -> PheromoneMatrix:
    if not 0.0 < rho < 1.0:
        raise ValueError(f"rho must be in (0, 1), got {rho}")
    P.tau *= 1.0 - rho
    return P


def _tour_edges(order: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(order, dtype=np.intp)
    return a, np.roll(a, -1)


def deposit_tour(P: PheromoneMatrix, tour: Tour, amount: float) -> PheromoneMatrix:
    """Add ``amount`` to both entries of each of the closed tour's edges."""
    if not amount > 0:
        raise ValueError(f"deposit amount must be positive, got {amount}")
    a, b = _tour_edges(tour.order)
    np.add.at(P.tau, (a, b), amount)
    np.add.at(P.tau, (b, a), amount)
    return P


def _deposit_many(P: PheromoneMatrix, tours: Sequence[Tour], q: float, eps: float) -> None:
    heads, tails, amounts = [], [], []
    for t in tours:
        a, b = _tour_edges(t.order)
        heads.append(a)
        tails.append(b)
        amounts.append(np.full(len(a), q / max(t.length, eps)))
    a = np.concatenate(heads)
    b = np.concatenate(tails)
    amt = np.concatenate(amounts)
    np.add.at(P.tau, (a, b), amt)
    np.add.at(P.tau, (b, a), amt)


def clamp(P: PheromoneMatrix, tau_min: float, tau_max: float) -> PheromoneMatrix:
    np.clip(P.tau, tau_min, tau_max, out=P.tau)
    np.fill_diagonal(P.tau, 0.0)
    return P


def mmas_update(P: PheromoneMatrix, tours: Iterable[Tour], params: AcoParams) -> PheromoneMatrix:
    """Evaporate, let every tour deposit ``q / length``, then clamp into ``[tau_min, tau_max]``."""
    tours = list(tours)
    if not tours:
        raise ValueError("mmas_update needs at least one tour")
    evaporate(P, params.rho)
    _deposit_many(P, tours, params.q_deposit, params.eta_epsilon)
    return clamp(P, params.tau_min, params.tau_max)


def elitist_update(P: PheromoneMatrix, best: Tour, params: AcoParams) -> PheromoneMatrix:
    """Evaporate, then deposit ``q / length`` along the best tour only (no clamping)."""
    evaporate(P, params.rho)
    return deposit_tour(P, best, params.q_deposit / max(best.length, params.eta_epsilon))
