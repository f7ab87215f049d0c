"""Partial paths and the three ways of extending them.

Two layers live here. The per-path functions (:func:`stochastic_extend`,
:func:`greedy_extend`, :func:`pick_top_n`, ...) operate on immutable
:class:`PartialPath` values and are the reference semantics. :class:`Beam`
holds a whole pool of equal-length partial paths as arrays and is what the
solvers run; :func:`extend_stochastic`, :func:`extend_greedy` and
:func:`prune` are its counterparts and produce exactly the same paths,
in the same order, from the same random stream.

Ordering conventions (needed for bit-reproducible greedy runs):

* candidate nodes with equal weight are taken lowest index first;
* paths are ranked by ``(length, order)``, i.e. ties in length are broken
  by lexicographic comparison of the visit order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import AbstractSet, Iterable, Sequence

import numpy as np

from .instance import DistanceMatrix, Tour
from .pheromone import AcoParams, PheromoneMatrix, heuristic_weights


class ExhaustedError(ValueError):
    """No unvisited node is left to extend a path with."""


@dataclass(frozen=True)
class PartialPath:
    order: tuple[int, ...]
    visited: frozenset[int]
    length: int

    @classmethod
    def start(cls, depot: int = 0) -> PartialPath:
        return cls((depot,), frozenset((depot,)), 0)

    @property
    def current(self) -> int:
        return self.order[-1]

    def extend(self, node: int, dm: DistanceMatrix) -> PartialPath:
        """Clone-and-append."""
        if node in self.visited:
            raise ValueError(f"node {node} already visited")
        return PartialPath(self.order + (node,), self.visited | {node}, self.length + dm[self.current, node])


def _weight_row(current: int, P: PheromoneMatrix, dm: DistanceMatrix, params: AcoParams,
                weights: np.ndarray | None) -> np.ndarray:
    if weights is not None:
        return np.array(weights[current], dtype=np.float64)
    return heuristic_weights(P.tau[current], dm.d[current], params.alpha, params.beta, params.eta_epsilon)


def _unvisited_mask(n: int, visited: Iterable[int]) -> np.ndarray:
    mask = np.ones(n, dtype=bool)
    mask[list(visited)] = False
    return mask


def extension_distribution(pp: PartialPath, P: PheromoneMatrix, dm: DistanceMatrix, params: AcoParams,
                           weights: np.ndarray | None = None) -> np.ndarray:
    """Probability of moving from ``pp.current`` to each node; zero on visited nodes."""
    n = dm.n
    if len(pp.visited) >= n:
        raise ExhaustedError("every node is already visited")
    w = _weight_row(pp.current, P, dm, params, weights)
    w[~_unvisited_mask(n, pp.visited)] = 0.0
    return w / w.sum()


def _roulette(w: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Draw ``u.shape[1]`` distinct columns per row of ``w`` without replacement.

    ``w`` is consumed (chosen entries are zeroed). Draw ``j`` of row ``i``
    uses ``u[i, j]`` against the cumulative weights left after the earlier
    draws, which is the same as renormalising and sampling again.
    """
    m, n = w.shape
    rows = np.arange(m)
    chosen = np.empty(u.shape, dtype=np.intp)
    for j in range(u.shape[1]):
        c = np.cumsum(w, axis=1)
        total = c[:, -1]
        if not np.all(total > 0):
            raise ExhaustedError("no unvisited node with positive weight")
        idx = np.count_nonzero(c <= (u[:, j] * total)[:, None], axis=1)
        over = idx >= n
        if over.any():
            # u * total rounded up to total: take the last positive-weight column
            idx[over] = n - 1 - np.argmax(w[over, ::-1] > 0, axis=1)
        chosen[:, j] = idx
        w[rows, idx] = 0.0
    return chosen


def stochastic_extend(pp: PartialPath, k: int, P: PheromoneMatrix, dm: DistanceMatrix, params: AcoParams,
                      rng: np.random.Generator, weights: np.ndarray | None = None) -> list[PartialPath]:
    """Extend ``pp`` by ``min(k, #unvisited)`` distinct nodes sampled from the move distribution.

    Children are returned in draw order. Consumes ``min(k, #unvisited)``
    doubles from ``rng``.
    """
    n = dm.n
    remaining = n - len(pp.visited)
    if remaining <= 0:
        raise ExhaustedError("every node is already visited")
    draws = min(k, remaining)
    w = _weight_row(pp.current, P, dm, params, weights)
    w[~_unvisited_mask(n, pp.visited)] = 0.0
    u = rng.random(draws)
    nodes = _roulette(w[None, :], u[None, :])[0]
    return [pp.extend(int(v), dm) for v in nodes]


def find_next_best(current: int, visited: AbstractSet[int], already_chosen: AbstractSet[int],
                   P: PheromoneMatrix, dm: DistanceMatrix, params: AcoParams,
                   weights: np.ndarray | None = None) -> int:
    """The eligible node with the largest weight from ``current`` (lowest index on ties).

    Calling this repeatedly while adding each answer to ``already_chosen``
    lists the eligible nodes in descending weight order.
    """
    w = _weight_row(current, P, dm, params, weights)
    return _argmax_excluding(w, visited, already_chosen)


def _argmax_excluding(w: np.ndarray, *excluded: AbstractSet[int]) -> int:
    w = w.copy()
    for s in excluded:
        if s:
            w[list(s)] = -np.inf
    best = int(np.argmax(w))
    if w[best] == -np.inf:
        raise ExhaustedError("no eligible node left")
    return best


def greedy_extend(pp: PartialPath, k: int, P: PheromoneMatrix, dm: DistanceMatrix, params: AcoParams,
                  weights: np.ndarray | None = None) -> list[PartialPath]:
    """Extend ``pp`` by its ``min(k, #unvisited)`` highest-weight unvisited nodes, best first."""
    remaining = dm.n - len(pp.visited)
    if remaining <= 0:
        raise ExhaustedError("every node is already visited")
    w = _weight_row(pp.current, P, dm, params, weights)
    chosen: list[int] = []
    for _ in range(min(k, remaining)):
        chosen.append(_argmax_excluding(w, pp.visited, set(chosen)))
    return [pp.extend(v, dm) for v in chosen]


def pick_top_n(pool: Iterable[PartialPath], n: int) -> list[PartialPath]:
    """The ``n`` shortest distinct paths by ``(length, order)``, shortest first.

    The pool is treated as a set: duplicate paths count once.
    """
    return sorted(set(pool), key=lambda p: (p.length, p.order))[:n]


def close_tour(pp: PartialPath, dm: DistanceMatrix) -> Tour:
    if len(pp.visited) != dm.n:
        raise ValueError(f"path visits {len(pp.visited)} of {dm.n} nodes; cannot close it")
    return Tour(pp.order, pp.length + dm[pp.current, pp.order[0]])


class Beam:
    """A pool of ``m`` partial paths that have all visited ``size`` nodes.

    ``lexrank`` orders the pool members by visit sequence (equal ranks mean
    equal sequences), so ranking by ``(length, order)`` never has to
    compare whole sequences.
    """

    __slots__ = ("orders", "visited", "lengths", "lexrank", "size")

    def __init__(self, orders: np.ndarray, visited: np.ndarray, lengths: np.ndarray, lexrank: np.ndarray, size: int):
        self.orders = orders
        self.visited = visited
        self.lengths = lengths
        self.lexrank = lexrank
        self.size = size

    @classmethod
    def start(cls, n_nodes: int, count: int = 1, depot: int = 0) -> Beam:
        orders = np.full((count, n_nodes), -1, dtype=np.intp)
        orders[:, 0] = depot
        visited = np.zeros((count, n_nodes), dtype=bool)
        visited[:, depot] = True
        return cls(orders, visited, np.zeros(count, dtype=np.int64), np.zeros(count, dtype=np.int64), 1)

    def __len__(self) -> int:
        return self.lengths.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.orders.shape[1]

    @property
    def current(self) -> np.ndarray:
        return self.orders[:, self.size - 1]

    @property
    def remaining(self) -> int:
        return self.n_nodes - self.size

    def take(self, idx: np.ndarray) -> Beam:
        return Beam(self.orders[idx], self.visited[idx], self.lengths[idx], self.lexrank[idx], self.size)

    def to_paths(self) -> list[PartialPath]:
        out = []
        for row, length in zip(self.orders[:, : self.size].tolist(), self.lengths.tolist()):
            out.append(PartialPath(tuple(row), frozenset(row), int(length)))
        return out

    def close(self, dm: DistanceMatrix) -> list[Tour]:
        if self.remaining:
            raise ValueError(f"paths visit {self.size} of {self.n_nodes} nodes; cannot close them")
        back = dm.d[self.current, self.orders[:, 0]]
        return [Tour(tuple(row), int(length)) for row, length in zip(self.orders.tolist(), (self.lengths + back).tolist())]


def _children(beam: Beam, nodes: np.ndarray, dm: DistanceMatrix) -> Beam:
    """Children of every pool member; ``nodes[i]`` lists the nodes appended to member ``i``."""
    m, per = nodes.shape
    parent = np.repeat(np.arange(m), per)
    node = nodes.reshape(-1)
    orders = beam.orders[parent]
    orders[:, beam.size] = node
    visited = beam.visited[parent]
    visited[np.arange(len(parent)), node] = True
    lengths = beam.lengths[parent] + dm.d[beam.current[parent], node]
    # a child's visit sequence sorts by (parent's sequence, appended node)
    prank = beam.lexrank[parent]
    perm = np.lexsort((node, prank))
    ks, kn = prank[perm], node[perm]
    step = np.empty(len(perm), dtype=np.int64)
    step[0] = 0
    step[1:] = (ks[1:] != ks[:-1]) | (kn[1:] != kn[:-1])
    lexrank = np.empty(len(perm), dtype=np.int64)
    lexrank[perm] = np.cumsum(step)
    return Beam(orders, visited, lengths, lexrank, beam.size + 1)


def extend_stochastic(beam: Beam, k: int, weights: np.ndarray, dm: DistanceMatrix, rng: np.random.Generator) -> Beam:
    """:func:`stochastic_extend` applied to every member, children grouped by parent."""
    if beam.remaining <= 0:
        raise ExhaustedError("every node is already visited")
    draws = min(k, beam.remaining)
    w = weights[beam.current]
    w[beam.visited] = 0.0
    u = rng.random((len(beam), draws))
    return _children(beam, _roulette(w, u), dm)


def extend_greedy(beam: Beam, k: int, weights: np.ndarray, dm: DistanceMatrix) -> Beam:
    """:func:`greedy_extend` applied to every member, children grouped by parent."""
    if beam.remaining <= 0:
        raise ExhaustedError("every node is already visited")
    take = min(k, beam.remaining)
    neg = -weights[beam.current]
    neg[beam.visited] = np.inf
    # stable sort: equal weights keep ascending node order
    nodes = np.argsort(neg, axis=1, kind="stable")[:, :take]
    return _children(beam, nodes, dm)


def prune(beam: Beam, n: int) -> Beam:
    """:func:`pick_top_n` on a pool: the ``n`` best distinct paths by ``(length, order)``, best first."""
    ranked = np.lexsort((beam.lexrank, beam.lengths))
    lex = beam.lexrank[ranked]
    # equal visit sequences have equal lexrank (and length) and end up adjacent
    first = np.ones(len(ranked), dtype=bool)
    first[1:] = lex[1:] != lex[:-1]
    return beam.take(ranked[first][:n])


def beam_from_paths(paths: Sequence[PartialPath], n_nodes: int) -> Beam:
    """Pack equal-length partial paths into a :class:`Beam` (pool order preserved)."""
    if not paths:
        raise ValueError("need at least one path")
    size = len(paths[0].order)
    if any(len(p.order) != size for p in paths):
        raise ValueError("all paths in a beam must have the same length")
    orders = np.full((len(paths), n_nodes), -1, dtype=np.intp)
    orders[:, :size] = [p.order for p in paths]
    visited = np.zeros((len(paths), n_nodes), dtype=bool)
    for i, p in enumerate(paths):
        visited[i, list(p.visited)] = True
    keys = sorted(set(p.order for p in paths))
    rank = {key: r for r, key in enumerate(keys)}
    lexrank = np.array([rank[p.order] for p in paths], dtype=np.int64)
    lengths = np.array([p.length for p in paths], dtype=np.int64)
    return Beam(orders, visited, lengths, lexrank, size)
