import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from beamaco.instance import (
    Point,
    Tour,
    TspInstance,
    build_distance_matrix,
    euc2d_distance,
    random_instance,
    tour_length,
)

coord = st.floats(min_value=-1e4, max_value=1e4, allow_nan=False)
points = st.builds(Point, coord, coord)


@pytest.mark.parametrize(
    "p, q, expected",
    [((0, 0), (3, 4), 5), ((7, 7), (7, 7), 0), ((0, 0), (1, 1), 1), ((0, 0), (0, 2.5), 3), ((0, 0), (0, 2.4999), 2)],
)
def test_euc2d_distance(p, q, expected):
    assert euc2d_distance(Point(*p), Point(*q)) == expected


def test_point_rejects_non_finite():
    with pytest.raises(ValueError):
        Point(float("nan"), 0.0)
    with pytest.raises(ValueError):
        Point(0.0, float("inf"))


def test_instance_validation():
    with pytest.raises(ValueError):
        TspInstance.from_coords("one", [(0, 0)])
    with pytest.raises(ValueError):
        TspInstance.from_coords("bad depot", [(0, 0), (1, 1)], depot=2)


@given(points, points)
def test_metric_symmetry(p, q):
    assert euc2d_distance(p, q) == euc2d_distance(q, p)


def test_two_point_matrix():
    inst = TspInstance.from_coords("pair", [(0, 0), (3, 4)])
    assert build_distance_matrix(inst).d.tolist() == [[0, 5], [5, 0]]


def test_collinear_matrix():
    dm = build_distance_matrix(TspInstance.from_coords("line", [(0, 0), (1, 0), (2, 0)]))
    assert dm[0, 2] == 2 == dm[0, 1] + dm[1, 2]


@settings(max_examples=50)
@given(st.lists(st.tuples(coord, coord), min_size=2, max_size=25))
def test_matrix_matches_scalar_metric(coords):
    inst = TspInstance.from_coords("h", coords)
    dm = build_distance_matrix(inst)
    assert np.array_equal(dm.d, dm.d.T)
    assert (np.diag(dm.d) == 0).all()
    assert (dm.d >= 0).all()
    for i in range(inst.n):
        for j in range(inst.n):
            if i != j:
                assert dm[i, j] == euc2d_distance(inst.points[i], inst.points[j])


def test_distance_matrix_is_read_only(square):
    dm = build_distance_matrix(square)
    with pytest.raises(ValueError):
        dm.d[0, 1] = 3


def test_square_tour_length(square):
    dm = build_distance_matrix(square)
    assert tour_length([0, 1, 2, 3], dm) == 40
    assert tour_length([0, 2, 1, 3], dm) == 10 + 14 + 10 + 14


def test_two_node_tour_is_out_and_back():
    dm = build_distance_matrix(TspInstance.from_coords("pair", [(0, 0), (3, 4)]))
    assert tour_length([0, 1], dm) == 10


@pytest.mark.parametrize("order", [[0, 1, 1, 3], [0, 1, 2], [0, 1, 2, 4], [0, 1, 2, 3, 0]])
def test_tour_length_rejects_non_permutations(square, order):
    with pytest.raises(ValueError):
        tour_length(order, build_distance_matrix(square))


def test_tour_must_start_at_depot(square):
    dm = build_distance_matrix(square)
    with pytest.raises(ValueError):
        Tour.from_order([1, 2, 3, 0], dm)
    assert Tour.from_order([0, 3, 2, 1], dm).length == 40


@settings(max_examples=50)
@given(st.integers(2, 30), st.integers(0, 2**32 - 1), st.randoms(use_true_random=False))
def test_length_invariant_under_reversal(n, seed, rnd):
    inst = random_instance(n, seed)
    dm = build_distance_matrix(inst)
    order = list(range(n))
    rnd.shuffle(order)
    assert tour_length(order, dm) == tour_length(order[::-1], dm) >= 0


def test_zero_length_only_for_coincident_points():
    same = TspInstance.from_coords("dup", [(1.1, 1.1), (1.2, 1.0), (1.0, 1.2)])
    assert tour_length([0, 1, 2], build_distance_matrix(same)) == 0
    apart = TspInstance.from_coords("apart", [(0, 0), (0, 1), (1, 0)])
    assert tour_length([0, 1, 2], build_distance_matrix(apart)) > 0


def test_random_instance_is_deterministic():
    a = random_instance(50, 1)
    b = random_instance(50, 1)
    assert a == b
    assert a.coords.tobytes() == b.coords.tobytes()
    assert random_instance(50, 2) != a


def test_random_instance_domain():
    inst = random_instance(250, 7, -100, 100)
    assert inst.n == 250
    assert ((inst.coords >= -100) & (inst.coords <= 100)).all()


@pytest.mark.parametrize("n, lo, hi", [(1, -100, 100), (0, -100, 100), (5, 1.0, 1.0)])
def test_random_instance_preconditions(n, lo, hi):
    with pytest.raises(ValueError):
        random_instance(n, 0, lo, hi)


def test_coords_array_matches_points():
    inst = random_instance(10, 3)
    assert inst.coords.shape == (10, 2)
    assert all(math.isclose(inst.coords[i, 0], p.x) for i, p in enumerate(inst.points))
