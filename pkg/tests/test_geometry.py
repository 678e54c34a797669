from fractions import Fraction

import pytest

from hkforge.geometry import (
    INT_CAP, Box, BoxRegion, HalfSpace, box_halfspace_volume, check_width,
    count_in_halfspace, floor_sum, region_halfspace_volume,
)
from hkforge.staircase import Ring, complement_boxes, make_ideal

import oracles


def H(a, beta):
    return HalfSpace(tuple(Fraction(v) for v in a), Fraction(beta))


def test_floor_sum_matches_loop():
    for n in range(0, 9):
        for m in range(1, 7):
            for a in range(0, 9):
                for b in range(0, 9):
                    assert floor_sum(n, m, a, b) == sum((a * i + b) // m for i in range(n))


def test_unit_box_contains_only_origin():
    assert count_in_halfspace([Box((0, 0), (1, 1))], H((1, 1), 10)) == 1


def test_whole_complement_inside():
    R = Ring(2, ("x", "y"))
    region = complement_boxes(make_ideal(R, [(2, 0), (0, 3)]))
    assert count_in_halfspace(region, H((1, 1), 100)) == 6


def test_triangle_count():
    R = Ring(2, ("x", "y"))
    region = complement_boxes(make_ideal(R, [(4, 0), (0, 4)]))
    assert count_in_halfspace(region, H((1, 1), 4)) == 10


def test_unbounded_box_count_against_enumeration():
    box = Box((1, 0, 2), (None, 3, None))
    a, beta = (Fraction(3, 2), Fraction(1), Fraction(2, 3)), Fraction(7)
    want = oracles.brute_count_halfspace(box.contains, a, beta, 3, scale=2)
    assert count_in_halfspace([box], H(a, beta), scale=2) == want


def test_empty_region_counts_zero():
    assert count_in_halfspace(BoxRegion(2, ()), H((1, 1), 5)) == 0


def test_halfspace_validation():
    with pytest.raises(ValueError):
        H((1, 0), 1)
    with pytest.raises(ValueError):
        H((1, 1), 0)
    with pytest.raises((TypeError, ValueError)):
        HalfSpace((0.5, 1.0), Fraction(1))


def test_halfspace_json_round_trip():
    h = HalfSpace.from_json({"a": ["1", "1", "3/2"], "beta": "6"})
    assert h.a == (1, 1, Fraction(3, 2)) and h.beta == 6
    assert HalfSpace.from_json(h.to_json()) == h


def test_integral_form_is_common_denominator():
    A, T = H(("1/2", "2/3"), "5/4").integral_form()
    assert (A, T) == ((6, 8), 15)


def test_simplex_volume():
    assert H((1, 2, 3), 6).simplex_volume() == Fraction(6 ** 3, 6 * 6)


def test_unit_square_under_three_halves():
    assert box_halfspace_volume(Box((0, 0), (1, 1)), H((1, 1), "3/2")) == Fraction(7, 8)


def test_complement_volume_fully_inside():
    R = Ring(2, ("x", "y"))
    region = complement_boxes(make_ideal(R, [(2, 0), (1, 1), (0, 3)]))
    assert region_halfspace_volume(region, H((1, 1), 6)) == 4


def test_unbounded_box_clipped():
    # [0,1) x [0,inf) under x + y < 3: 3 - 1/2
    assert box_halfspace_volume(Box((0, 0), (1, None)), H((1, 1), 3)) == Fraction(5, 2)


@pytest.mark.parametrize("lower, upper, a, beta", [
    ((0, 0), (2, 3), (1, 1), "7/2"),
    ((1, 0, 2), (3, 2, 5), ("1/2", 1, "3/2"), 5),
    ((0, 1, 0), (4, 2, 1), (1, 3, 2), "13/3"),
])
def test_vertex_formula_against_integration(lower, upper, a, beta):
    got = box_halfspace_volume(Box(lower, upper), H(a, beta))
    assert got == oracles.integrated_volume(lower, upper, a, beta)
    lo, hi = oracles.bisection_bounds(lower, upper, a, beta, depth=5)
    assert lo <= got <= hi


def test_width_guard():
    assert check_width(INT_CAP) == INT_CAP
    with pytest.raises(OverflowError):
        check_width(INT_CAP + 1)


def test_box_helpers():
    b = Box((1, 2), (3, None))
    assert not b.bounded and b.size() is None and b.max_degree() is None
    assert b.contains((2, 100)) and not b.contains((3, 2))
    c = Box((1, 2), (3, 4))
    assert c.size() == 4 and c.max_degree() == 5 and c.top_corner() == (2, 3)
