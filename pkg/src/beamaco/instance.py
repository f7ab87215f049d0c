"""TSP instances, the TSPLIB EUC_2D metric and tour scoring."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class TspInstance:
    """A named set of 2-D points; node ``i`` is ``points[i]``.

    Every tour starts and ends at ``depot``.
    """

    name: str
    points: tuple[Point, ...]
    depot: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", tuple(self.points))
        if len(self.points) < 2:
            raise ValueError("an instance needs at least 2 points")
        if not 0 <= self.depot < len(self.points):
            raise ValueError(f"depot {self.depot} out of range for {len(self.points)} points")

    @classmethod
    def from_coords(cls, name: str, coords: Iterable[Sequence[float]], depot: int = 0) -> TspInstance:
        return cls(name, tuple(Point(float(x), float(y)) for x, y in coords), depot)

    @property
    def n(self) -> int:
        return len(self.points)

    @cached_property
    def coords(self) -> np.ndarray:
        """``(n, 2)`` float64 array of coordinates (read-only)."""
        arr = np.array([(p.x, p.y) for p in self.points], dtype=np.float64)
        arr.flags.writeable = False
        return arr


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric integer distances with a zero diagonal."""

    d: np.ndarray

    def __post_init__(self) -> None:
        d = np.asarray(self.d, dtype=np.int64)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError(f"distance matrix must be square, got shape {d.shape}")
        d = d.copy()
        d.flags.writeable = False
        object.__setattr__(self, "d", d)

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        return int(self.d[ij])


@dataclass(frozen=True)
class Tour:
    """A closed tour; ``order[0]`` is the depot and ``length`` includes the way back."""

    order: tuple[int, ...]
    length: int

    @classmethod
    def from_order(cls, order: Sequence[int], dm: DistanceMatrix, depot: int = 0) -> Tour:
        order = tuple(int(v) for v in order)
        if not order or order[0] != depot:
            raise ValueError(f"tour must start at depot {depot}")
        return cls(order, tour_length(order, dm))


def euc2d_distance(p: Point, q: Point) -> int:
    dx = p.x - q.x
    dy = p.y - q.y
    # sqrt of the explicit sum of squares (not hypot) so the vectorised matrix agrees bit for bit
    return int(math.floor(math.sqrt(dx * dx + dy * dy) + 0.5))


def build_distance_matrix(inst: TspInstance) -> DistanceMatrix:
    xy = inst.coords
    dx = xy[:, 0][:, None] - xy[:, 0][None, :]
    dy = xy[:, 1][:, None] - xy[:, 1][None, :]
    d = np.floor(np.sqrt(dx * dx + dy * dy) + 0.5).astype(np.int64)
    np.fill_diagonal(d, 0)
    return DistanceMatrix(d)


def check_permutation(order: Sequence[int], n: int) -> None:
    if len(order) != n:
        raise ValueError(f"tour visits {len(order)} nodes, expected {n}")
    seen = np.zeros(n, dtype=bool)
    for v in order:
        if not 0 <= v < n:
            raise ValueError(f"node {v} out of range")
        if seen[v]:
            raise ValueError(f"node {v} visited twice")
        seen[v] = True


def tour_length(order: Sequence[int], dm: DistanceMatrix) -> int:
    """Length of the closed tour through ``order``, including the edge back to ``order[0]``."""
    check_permutation(order, dm.n)
    idx = np.asarray(order, dtype=np.intp)
    return int(dm.d[idx, np.roll(idx, -1)].sum())


def random_instance(n: int, seed: int, lo: float = -100.0, hi: float = 100.0) -> TspInstance:
    """Uniform random points in ``[lo, hi]^2``; the same seed always gives the same instance."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo}, hi={hi}")
    rng = np.random.default_rng(seed)
    xy = rng.uniform(lo, hi, size=(n, 2))
    return TspInstance.from_coords(f"rand{n}-s{seed}", xy.tolist())
