"""Solver drivers: Elitist, MMAS, Beam-ACO and greedy Beam-ACO.

An iteration is one complete round of tour construction for every ant
followed by a single pheromone update, so updates only ever see complete
tours. Stop predicates are checked between iterations and never cut one
short.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .construction import Beam, extend_greedy, extend_stochastic, prune
from .instance import DistanceMatrix, Tour, TspInstance, build_distance_matrix
from .pheromone import AcoParams, PheromoneMatrix, elitist_update, init_pheromone, mmas_update, weight_matrix

IterationCallback = Callable[[int, PheromoneMatrix, Tour], None]


class UnknownAlgorithmError(ValueError):
    pass


# -- stop predicates ---------------------------------------------------------

class StopPredicate:
    def __call__(self, iterations: int, elapsed: float) -> bool:
        raise NotImplementedError


@dataclass(frozen=True)
class MaxIterations(StopPredicate):
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ValueError(f"iteration budget must be at least 1, got {self.count}")

    def __call__(self, iterations: int, elapsed: float) -> bool:
        return iterations >= self.count


@dataclass(frozen=True)
class WallClock(StopPredicate):
    seconds: float

    def __post_init__(self) -> None:
        if not self.seconds > 0:
            raise ValueError(f"time budget must be positive, got {self.seconds}")

    def __call__(self, iterations: int, elapsed: float) -> bool:
        return elapsed >= self.seconds


@dataclass(frozen=True, init=False)
class FirstOf(StopPredicate):
    """Stop as soon as any member says stop."""

    members: tuple[StopPredicate, ...]

    def __init__(self, *members: StopPredicate):
        if not members:
            raise ValueError("FirstOf needs at least one predicate")
        object.__setattr__(self, "members", tuple(members))

    def __call__(self, iterations: int, elapsed: float) -> bool:
        return any(p(iterations, elapsed) for p in self.members)


@dataclass(frozen=True, init=False)
class AllOf(StopPredicate):
    """Stop once every member says stop ("whichever takes longer")."""

    members: tuple[StopPredicate, ...]

    def __init__(self, *members: StopPredicate):
        if not members:
            raise ValueError("AllOf needs at least one predicate")
        object.__setattr__(self, "members", tuple(members))

    def __call__(self, iterations: int, elapsed: float) -> bool:
        return all(p(iterations, elapsed) for p in self.members)


# -- results -----------------------------------------------------------------

@dataclass
class WorkCounter:
    """Number of partial paths created (every clone-and-append counts once)."""

    partial_paths: int = 0

    def add(self, count: int) -> None:
        self.partial_paths += int(count)


@dataclass
class SolverResult:
    best_tour: Tour
    iterations: int
    partial_paths_considered: int
    elapsed: float
    seed: int | None
    algorithm: str
    params: AcoParams
    history: list[int] = field(default_factory=list)  # best-so-far length after each iteration

    @property
    def length(self) -> int:
        return self.best_tour.length

    @property
    def kpp_per_second(self) -> float:
        """Thousands of partial paths per second."""
        if self.elapsed <= 0:
            return math.inf
        return self.partial_paths_considered / self.elapsed / 1000.0

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "length": self.best_tour.length,
            "tour": list(self.best_tour.order),
            "iterations": self.iterations,
            "partial_paths": self.partial_paths_considered,
            "elapsed_s": self.elapsed,
            "kpp_s": self.kpp_per_second,
            "seed": self.seed,
            "history": list(self.history),
        }


# -- construction phases -------------------------------------------------------

def _ants(weights: np.ndarray, dm: DistanceMatrix, depot: int, n_ants: int,
          rng: np.random.Generator, counter: WorkCounter) -> list[Tour]:
    """One tour per ant, each built by single-node sampling."""
    beam = Beam.start(dm.n, n_ants, depot)
    while beam.remaining:
        beam = extend_stochastic(beam, 1, weights, dm, rng)
        counter.add(len(beam))
    return beam.close(dm)


def _stochastic_beam(weights: np.ndarray, dm: DistanceMatrix, depot: int, n_ants: int, k: int,
                     n_paths: int, rng: np.random.Generator, counter: WorkCounter) -> list[Tour]:
    beam = Beam.start(dm.n, n_ants, depot)
    while beam.remaining:
        children = extend_stochastic(beam, k, weights, dm, rng)
        counter.add(len(children))
        beam = prune(children, n_paths)
    return beam.close(dm)


def _greedy_beam(weights: np.ndarray, dm: DistanceMatrix, depot: int, k: int,
                 n_paths: int, counter: WorkCounter) -> list[Tour]:
    beam = Beam.start(dm.n, 1, depot)
    while beam.remaining:
        children = extend_greedy(beam, k, weights, dm)
        counter.add(len(children))
        beam = prune(children, n_paths)
    return beam.close(dm)


def _distinct(tours: Sequence[Tour]) -> list[Tour]:
    return list({t.order: t for t in tours}.values())


def _stop_or_default(stop: StopPredicate | None) -> StopPredicate:
    return stop if stop is not None else MaxIterations(5)


def _resolve_seed(seed: int | None) -> int:
    if seed is None:
        return int(np.random.SeedSequence().entropy % (2**63))
    return int(seed)


def _drive(algorithm: str, params: AcoParams, stop: StopPredicate, seed: int | None,
           dm: DistanceMatrix, callback: IterationCallback | None,
           construct: Callable[[np.ndarray, WorkCounter], list[Tour]],
           update: Callable[[PheromoneMatrix, list[Tour], Tour], None]) -> SolverResult:
    P = init_pheromone(dm.n, params.tau_init)
    counter = WorkCounter()
    best: Tour | None = None
    history: list[int] = []
    iterations = 0
    t0 = time.perf_counter()
    while not stop(iterations, time.perf_counter() - t0):
        weights = weight_matrix(P, dm, params)
        tours = construct(weights, counter)
        it_best = min(tours, key=lambda t: (t.length, t.order))
        if best is None or it_best.length < best.length:
            best = it_best
        update(P, tours, best)
        iterations += 1
        history.append(best.length)
        if callback is not None:
            callback(iterations, P, best)
    elapsed = time.perf_counter() - t0
    assert best is not None  # stop predicates cannot fire before the first iteration
    return SolverResult(best, iterations, counter.partial_paths, elapsed, seed, algorithm, params, history)


# -- public drivers ----------------------------------------------------------------

def run_elitist(inst: TspInstance, params: AcoParams | None = None, stop: StopPredicate | None = None,
                seed: int | None = 0, *, rng: np.random.Generator | None = None,
                dm: DistanceMatrix | None = None, callback: IterationCallback | None = None) -> SolverResult:
    """Elitist Ant System: only the best tour found so far deposits pheromone."""
    params = params or AcoParams()
    seed = _resolve_seed(seed)
    rng = rng if rng is not None else np.random.default_rng(seed)
    dm_ = dm if dm is not None else build_distance_matrix(inst)

    def construct(weights, counter):
        return _ants(weights, dm_, inst.depot, params.n_ants, rng, counter)

    def update(P, tours, best):
        elitist_update(P, best, params)

    return _drive("elitist", params, _stop_or_default(stop), seed, dm_, callback, construct, update)


def run_mmas(inst: TspInstance, params: AcoParams | None = None, stop: StopPredicate | None = None,
             seed: int | None = 0, *, rng: np.random.Generator | None = None,
             dm: DistanceMatrix | None = None, callback: IterationCallback | None = None) -> SolverResult:
    """Max-Min Ant System: every ant deposits, levels clamped to the configured bounds."""
    params = params or AcoParams()
    seed = _resolve_seed(seed)
    rng = rng if rng is not None else np.random.default_rng(seed)
    dm_ = dm if dm is not None else build_distance_matrix(inst)

    def construct(weights, counter):
        return _ants(weights, dm_, inst.depot, params.n_ants, rng, counter)

    def update(P, tours, best):
        mmas_update(P, tours, params)

    return _drive("mmas", params, _stop_or_default(stop), seed, dm_, callback, construct, update)


def run_beam_aco(inst: TspInstance, params: AcoParams | None = None, stop: StopPredicate | None = None,
                 seed: int | None = 0, *, rng: np.random.Generator | None = None,
                 dm: DistanceMatrix | None = None, callback: IterationCallback | None = None) -> SolverResult:
    """Beam-ACO: stochastic beam construction followed by an MMAS update.

    All ants share one pool, which starts as one depot path per ant. Each
    step every member gets ``beam_width`` sampled children, duplicates
    collapse, and the pool is cut back to the ``n_paths`` shortest
    (default ``n_ants * beam_width``). Every completed tour of the final
    pool deposits pheromone.
    """
    params = params or AcoParams()
    seed = _resolve_seed(seed)
    rng = rng if rng is not None else np.random.default_rng(seed)
    dm_ = dm if dm is not None else build_distance_matrix(inst)

    def construct(weights, counter):
        return _distinct(_stochastic_beam(weights, dm_, inst.depot, params.n_ants, params.beam_width,
                                          params.paths_kept, rng, counter))

    def update(P, tours, best):
        mmas_update(P, tours, params)

    return _drive("beam", params, _stop_or_default(stop), seed, dm_, callback, construct, update)


def run_gbeam_aco(inst: TspInstance, params: AcoParams | None = None, stop: StopPredicate | None = None,
                  seed: int | None = 0, *, rng: np.random.Generator | None = None,
                  dm: DistanceMatrix | None = None, callback: IterationCallback | None = None,
                  redundant_ants: bool = False) -> SolverResult:
    """Greedy Beam-ACO: each member's children are its ``beam_width`` best-weighted moves.

    No random numbers are drawn; ``seed`` is only echoed and ``rng`` is
    never touched. Every ant would build the identical beam, so one ant is
    used unless ``redundant_ants`` is set, in which case ``params.n_ants``
    ants each build their own beam (same result, n-fold work). Each ant
    keeps ``n_paths`` paths (default ``beam_width``).
    """
    params = params or AcoParams()
    dm_ = dm if dm is not None else build_distance_matrix(inst)
    ants = params.n_ants if redundant_ants else 1
    kept = params.n_paths if params.n_paths is not None else params.beam_width

    def construct(weights, counter):
        tours: list[Tour] = []
        for _ in range(ants):
            tours.extend(_greedy_beam(weights, dm_, inst.depot, params.beam_width, kept, counter))
        return _distinct(tours)

    def update(P, tours, best):
        mmas_update(P, tours, params)

    return _drive("gbeam", params, _stop_or_default(stop), seed, dm_, callback, construct, update)


ALGORITHMS: dict[str, Callable[..., SolverResult]] = {
    "elitist": run_elitist,
    "mmas": run_mmas,
    "beam": run_beam_aco,
    "gbeam": run_gbeam_aco,
}


def solve(inst: TspInstance, algorithm: str, params: AcoParams | None = None,
          stop: StopPredicate | None = None, seed: int | None = 0, **kwargs) -> SolverResult:
    try:
        runner = ALGORITHMS[algorithm]
    except KeyError:
        raise UnknownAlgorithmError(
            f"unknown algorithm {algorithm!r}; choose from {', '.join(ALGORITHMS)}"
        ) from None
    return runner(inst, params, stop, seed, **kwargs)


def equivalent_beam_width(n_ants: int, k: int) -> int:
    """Greedy beam width whose per-step child count ``w**2`` matches ``n_ants * k**2``."""
    if n_ants < 1 or k < 1:
        raise ValueError("n_ants and k must be at least 1")
    return int(math.floor(k * math.sqrt(n_ants) + 0.5))
