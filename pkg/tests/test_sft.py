import itertools
from fractions import Fraction

import pytest

from services.sft import make_bisequence, make_sft, minimal_rotation, periodic_point
from utils.errors import ModelError


def _one_at(index: int):
    return make_bisequence((0,), 0, index, (1,), (0,), 0)


def test_minimal_rotation():
    assert minimal_rotation((1, 0, 0)) == ((0, 0, 1), 1)


def test_periodic_points_are_canonical():
    assert periodic_point((1, 0), 1) == periodic_point((0, 1), 0)
    assert periodic_point((0, 1), 0) != periodic_point((0, 1), 1)
    assert periodic_point((0,)).is_periodic


def test_canonical_form_keeps_symbols():
    x = make_bisequence((0, 1), 0, -3, (0, 0, 1, 0, 1, 0), (0,), 0)
    center = (0, 0, 1, 0, 1, 0)

    def naive(i):
        if i < -3:
            return (0, 1)[i % 2]
        if i < 3:
            return center[i + 3]
        return 0

    assert all(x.at(i) == naive(i) for i in range(-12, 13))


def test_canonical_form_absorbs_tails():
    x = make_bisequence((0,), 0, -2, (0, 0, 1, 0, 0), (0,), 0)
    assert x.center == (1,)
    assert x.left_cut == 0
    assert x.complexity == 1
    assert x == _one_at(0)


def test_shift_moves_coordinates_left(golden_sft):
    x = make_bisequence((0, 1), 1, -2, (0, 0, 1, 0), (0,), 0)
    for power in (1, 2, -3):
        y = golden_sft.apply(x, power)
        assert all(y.at(i) == x.at(i + power) for i in range(-10, 11))
    assert golden_sft.apply(golden_sft.apply(x, 5), -5) == x


def test_metric(golden_sft, zeros):
    assert golden_sft.distance(zeros, zeros) == 0
    assert golden_sft.distance(_one_at(0), zeros) == 2
    assert golden_sft.distance(_one_at(1), zeros) == 1
    assert golden_sft.distance(_one_at(-2), zeros) == Fraction(1, 2)
    assert golden_sft.distance(_one_at(2), _one_at(-2)) == Fraction(1, 2)


def test_agreement_on_a_window_sets_the_distance(golden_sft, zeros):
    # equal exactly on [-3, 3]
    assert golden_sft.distance(_one_at(4), zeros) == Fraction(1, 8)
    assert golden_sft.distance(_one_at(-4), zeros) == Fraction(1, 8)
    assert golden_sft.distance(_one_at(4), _one_at(-5)) == Fraction(1, 8)


def test_constants(golden_sft):
    assert golden_sft.lam_exact == 2
    assert golden_sft.eps_x_exact == 1
    assert golden_sft.eps_x_prime_exact == Fraction(1, 4)
    assert golden_sft.entropy == pytest.approx(0.48121182505960347)


def test_bracket_needs_agreement_at_zero(golden_sft, zeros):
    assert golden_sft.bracket(_one_at(0), zeros) is None
    assert golden_sft.bracket(_one_at(1), zeros) == _one_at(1)
    y = _one_at(2)
    assert golden_sft.bracket(y, zeros) == y
    assert golden_sft.bracket(zeros, y) == zeros
    z = make_bisequence((0,), 0, -2, (1, 0, 0, 0, 1), (0,), 0)
    assert golden_sft.bracket(z, y) == y
    assert golden_sft.bracket(y, z) == z


def test_periodic_orbit_validation(golden_sft):
    assert golden_sft.periodic_orbit([1, 0]).word == (0, 1)
    with pytest.raises(ModelError):
        golden_sft.periodic_orbit([1])
    with pytest.raises(ModelError):
        golden_sft.periodic_orbit([0, 1, 0, 1])
    with pytest.raises(ModelError):
        golden_sft.periodic_orbit([2])
    with pytest.raises(ModelError):
        golden_sft.periodic_orbit([])


def test_invalid_adjacency():
    with pytest.raises(ModelError):
        make_sft([[1, 2], [1, 0]])
    with pytest.raises(ModelError):
        make_sft([[1, 1]])


def test_disjoint_orbits_required(golden_sft):
    P = golden_sft.periodic_orbit([0])
    with pytest.raises(ModelError):
        golden_sft.enumerate_homoclinic(P, P, 2)


def test_enumeration_of_the_full_shift(full_shift):
    P, Q = full_shift.periodic_orbit([0]), full_shift.periodic_orbit([1])
    assert len(full_shift.enumerate_homoclinic(P, Q, 0)) == 1
    points = full_shift.enumerate_homoclinic(P, Q, 1)
    assert len(points) == 4
    assert len(set(points)) == 4
    assert [x.complexity for x in points] == sorted(x.complexity for x in points)
    for x in points:
        assert all(x.at(i) == 1 for i in range(-20, -2))
        assert all(x.at(i) == 0 for i in range(2, 20))


def test_cylinder_enumeration_follows_global_order(golden_sft):
    P, Q = golden_sft.periodic_orbit([0]), golden_sft.periodic_orbit([0, 1])
    found = list(itertools.islice(golden_sft.homoclinic_in_cylinder(P, Q, (0, 1, 0), max_extension=3), 12))
    assert found
    assert [x.sort_key for x in found] == sorted(x.sort_key for x in found)
    for x in found:
        assert x.window(-1, 1) == (0, 1, 0)
        assert x in set(golden_sft.enumerate_homoclinic(P, Q, x.complexity))


def test_cylinder_word_must_be_odd(golden_sft):
    P, Q = golden_sft.periodic_orbit([0]), golden_sft.periodic_orbit([0, 1])
    with pytest.raises(ValueError):
        next(golden_sft.homoclinic_in_cylinder(P, Q, (0, 1)))


def test_orbit_signature_is_shift_invariant(golden_sft):
    x = make_bisequence((0, 1), 0, -1, (0, 0, 1), (0,), 0)
    assert golden_sft.orbit_signature(x) == golden_sft.orbit_signature(golden_sft.apply(x, 7))
    assert golden_sft.orbit_signature(x) != golden_sft.orbit_signature(_one_at(0))
