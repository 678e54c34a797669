import pytest

from hkforge.errors import DimensionMismatch, InclusionError, PreconditionError
from hkforge.staircase import (
    Colength, Ring, bracket_power, colength, colon, colon_monomial, complement_boxes,
    contains_monomial, difference_region, excess_over_degree, intersect, is_m_primary,
    m_power, make_ideal, minimalize, monomial_multiple, non_member, relative_colength,
    saturation, saturation_by_variables, saturation_fixpoint,
)

import oracles


def ideal(ring, *gens):
    return make_ideal(ring, gens)


# -- normalization and membership ---------------------------------------------------

def test_divisible_generator_dropped(R2):
    assert ideal(R2, (2, 0), (3, 1)).gens == ((2, 0),)


def test_empty_generators_give_zero(R2):
    I = make_ideal(R2, [])
    assert I.is_zero and not I.is_unit


def test_example_ideal_at_p5_kept_whole():
    R = Ring(5, ("x", "y", "z"))
    J = ideal(R, (5, 0, 0), (1, 1, 1), (0, 5, 0))
    assert set(J.gens) == {(5, 0, 0), (1, 1, 1), (0, 5, 0)}
    assert list(J.gens) == sorted(J.gens)


def test_minimalize_dedups_and_orders():
    assert minimalize([(1, 2), (1, 2), (0, 3), (2, 2)]) == ((0, 3), (1, 2))


@pytest.mark.parametrize("e, expected", [((1, 3), True), ((1, 0), False)])
def test_membership(R2, e, expected):
    assert contains_monomial(ideal(R2, (2, 0), (1, 1)), e) is expected


def test_zero_ideal_has_no_members(R2):
    assert not contains_monomial(R2.zero(), (7, 7))


def test_membership_dimension_mismatch(R2):
    with pytest.raises(DimensionMismatch):
        contains_monomial(R2.unit(), (1, 0, 0))


def test_negative_generator_rejected(R2):
    with pytest.raises(PreconditionError):
        make_ideal(R2, [(-1, 0)])


def test_dimension_mismatch(R2):
    with pytest.raises(PreconditionError):
        make_ideal(R2, [(1, 2, 3)])


# -- lattice operations --------------------------------------------------------------

def test_intersection_of_coordinate_ideals(R2):
    assert intersect(ideal(R2, (1, 0)), ideal(R2, (0, 1))).gens == ((1, 1),)


def test_colon_by_x_at_q4(R2):
    assert colon(ideal(R2, (4, 0), (0, 4)), ideal(R2, (1, 0))) == ideal(R2, (3, 0), (0, 4))


def test_primary_decomposition_of_the_example(R3):
    got = intersect(ideal(R3, (2, 0, 0), (1, 1, 0), (0, 2, 0)),
                    ideal(R3, (2, 0, 0), (0, 0, 1), (0, 2, 0)))
    assert set(got.gens) == {(2, 0, 0), (1, 1, 1), (0, 2, 0)}


def test_colon_by_zero_is_unit(R2):
    assert colon(ideal(R2, (1, 0)), R2.zero()).is_unit


def test_colon_matches_definition(R3):
    I = ideal(R3, (3, 1, 0), (0, 2, 2), (1, 1, 1))
    for w in [(1, 0, 0), (1, 1, 0), (0, 2, 1), (4, 4, 4)]:
        assert list(colon_monomial(I, w).gens) == oracles.brute_colon(I.gens, w, 3)


def test_monomial_multiple(R2):
    assert monomial_multiple(ideal(R2, (1, 0), (0, 2)), (1, 1)).gens == ((1, 3), (2, 1))


def test_bracket_power():
    R = Ring(3, ("x", "y"))
    assert bracket_power(ideal(R, (2, 0), (1, 1)), 3) == ideal(R, (6, 0), (3, 3))


def test_bracket_of_zero(R2):
    assert bracket_power(R2.zero(), 8).is_zero


def test_bracket_power_of_example_at_p5():
    R = Ring(5, ("x", "y", "z"))
    J = ideal(R, (5, 0, 0), (1, 1, 1), (0, 5, 0))
    assert bracket_power(J, 5) == ideal(R, (25, 0, 0), (5, 5, 5), (0, 25, 0))


def test_bracket_power_rejects_non_power(R2):
    with pytest.raises(PreconditionError):
        bracket_power(ideal(R2, (1, 0)), 6)


def test_m_power_generators(R3):
    assert len(m_power(R3, 4).gens) == 15


# -- saturation ------------------------------------------------------------------------

def test_saturation_of_scaled_example():
    R = Ring(5, ("x", "y", "z"))
    I = ideal(R, (10, 0, 0), (5, 5, 5), (0, 10, 0))
    assert saturation(I) == ideal(R, (10, 0, 0), (5, 5, 0), (0, 10, 0))


def test_saturation_of_m_primary_is_unit(R2):
    assert saturation(ideal(R2, (3, 0), (1, 1), (0, 5))).is_unit


def test_principal_prime_is_saturated(R2):
    I = ideal(R2, (1, 0))
    assert saturation(I) == I


@pytest.mark.parametrize("gens", [
    [(2, 0, 0), (1, 1, 1), (0, 2, 0)],
    [(0, 0, 4), (2, 3, 1), (5, 0, 0)],
    [(1, 1, 1)],
    [(3, 0, 2), (0, 3, 2), (1, 1, 5)],
])
def test_three_saturation_routes_agree(R3, gens):
    I = make_ideal(R3, gens)
    fast = saturation(I)
    assert fast == saturation_fixpoint(I) == saturation_by_variables(I)
    grid, shape = oracles.brute_saturation_grid(I.gens, 3)
    assert (oracles.membership_grid(fast.gens, shape) == grid).all()


def test_saturation_edge_ideals(R2):
    assert saturation(R2.zero()).is_zero
    assert saturation(R2.unit()).is_unit


# -- colength ----------------------------------------------------------------------------

def test_relative_colength_of_equal_ideals(R2):
    I = ideal(R2, (1, 2))
    assert relative_colength(I, I) == Colength(0)


def test_example_difference_is_single_monomial(R3):
    I = ideal(R3, (2, 0, 0), (1, 1, 1), (0, 2, 0))
    J = ideal(R3, (2, 0, 0), (1, 1, 0), (0, 2, 0))
    got = relative_colength(I, J)
    assert got == Colength(1) == Colength(oracles.brute_relative_colength(I.gens, J.gens, 3))
    assert list(difference_region(I, J).boxes[0].lower) == [1, 1, 0]


def test_infinite_colength(R2):
    got = relative_colength(ideal(R2, (1, 0)), R2.unit())
    assert not got.is_finite
    with pytest.raises(PreconditionError):
        int(got)


def test_inclusion_violation_has_witness(R2):
    with pytest.raises(InclusionError) as info:
        relative_colength(ideal(R2, (1, 0)), ideal(R2, (0, 1)))
    assert info.value.witness == (1, 0)


def test_non_member_helper(R2):
    assert non_member(ideal(R2, (0, 1), (2, 0)), ideal(R2, (1, 0))) == (0, 1)
    assert non_member(ideal(R2, (2, 0)), ideal(R2, (1, 0))) is None


def test_complement_box_count(R2):
    region = complement_boxes(ideal(R2, (2, 0), (0, 3)))
    assert region.count() == 6


def test_complement_of_staircase_with_corner(R2):
    I = ideal(R2, (2, 0), (1, 1), (0, 3))
    assert complement_boxes(I).count() == 4 == oracles.brute_colength(I.gens, 2)


def test_complement_of_principal_is_one_unbounded_box(R2):
    region = complement_boxes(ideal(R2, (1, 0)))
    assert len(region) == 1
    (box,) = region
    assert box.lower == (0, 0) and box.upper == (1, None)


def test_complement_of_zero_or_unit_rejected(R2):
    with pytest.raises(PreconditionError):
        complement_boxes(R2.zero())
    with pytest.raises(PreconditionError):
        complement_boxes(R2.unit())


@pytest.mark.parametrize("gens, expected", [
    ([(2, 0), (0, 3)], True), ([(1, 0)], False), ([(1, 1)], False),
])
def test_m_primary(R2, gens, expected):
    assert is_m_primary(make_ideal(R2, gens)) is expected


def test_colength_matches_oracle(R3):
    I = ideal(R3, (4, 0, 0), (0, 3, 0), (0, 0, 5), (1, 1, 1), (2, 0, 2))
    assert int(colength(I)) == oracles.brute_colength(I.gens, 3)


# -- degree excess -------------------------------------------------------------------------

def test_excess_over_degree_against_m_power(R3):
    J = ideal(R3, (2, 0, 0), (1, 1, 1), (0, 2, 0))
    for q in (1, 2, 4):
        Jq = bracket_power(J, q)
        S = saturation(Jq)
        for k in range(0, 6 * q):
            w = excess_over_degree(Jq, S, k)
            mk = m_power(R3, k)
            same = intersect(Jq, mk) == intersect(S, mk)
            assert (w is None) == same, (q, k)
            if w is not None:
                assert sum(w) >= k and w in S and w not in Jq
