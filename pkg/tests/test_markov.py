from fractions import Fraction

import pytest

from services.markov import golden_power, partition_for
from services.torus import make_torus
from utils.errors import CoverError


def test_golden_power():
    assert golden_power([[1, 1], [1, 0]]) == 1
    assert golden_power([[2, 1], [1, 1]]) == 2
    assert golden_power([[3, 2], [2, 1]]) == 3
    assert golden_power([[3, 1], [2, 1]]) is None


def test_other_matrices_have_no_partition():
    with pytest.raises(CoverError):
        partition_for(make_torus([[3, 1], [2, 1]]))


def test_transfer_matrix(cat_torus):
    partition = partition_for(cat_torus)
    assert partition.power == 2
    assert int(partition.transfer.sum()) == 3
    assert partition.word_count(0) == 2
    assert partition.word_count(1) == 5
    assert partition.word_count(2) == 13
    words = list(partition.words(2))
    assert len(words) == 13
    assert words == sorted(words)


def test_golden_automorphism_partition(golden_torus, cat_torus):
    partition = partition_for(golden_torus)
    assert partition.power == 1
    assert int(partition.transfer.sum()) == 3
    assert (partition.transfer == partition_for(cat_torus).transfer).all()
    assert partition.word_count(1) == 5
    x = golden_torus.make_point(Fraction(1, 3), Fraction(1, 5))
    words = partition.words_containing(x, 2, golden_torus.q(0))
    assert len(words) == 1


def test_tiles_cover_a_fundamental_domain(cat_torus):
    partition = partition_for(cat_torus)
    area = sum((u[1] - u[0]) * (s[1] - s[0]) for u, s in partition.tiles.values())
    lattice_area = partition.a_len * partition.a_len + partition.b_len * partition.b_len
    assert area == lattice_area


@pytest.mark.parametrize("radius", [0, 2, 4])
def test_generic_points_have_one_itinerary(cat_torus, radius):
    partition = partition_for(cat_torus)
    zero = cat_torus.q(0)
    for x in (cat_torus.make_point(Fraction(1, 3), Fraction(1, 5)), cat_torus.make_point(Fraction(5, 7), Fraction(2, 9))):
        words = partition.words_containing(x, radius, zero)
        assert len(words) == 1
        assert len(words[0]) == 2 * radius + 1
        margin = partition.side_margin(x, words[0], zero)
        assert margin is not None and margin > 0


def test_enlarged_boxes_overlap_near_boundaries(cat_torus):
    partition = partition_for(cat_torus)
    zero = cat_torus.q(0)
    (u_lo, _), (s_lo, s_hi) = partition.tiles[0]
    # just inside the u = 0 side of the big square
    x = cat_torus.point_from_eigen(u_lo + Fraction(1, 10**6), (s_lo + s_hi) / 2)
    assert len(partition.words_containing(x, 0, zero)) == 1
    assert len(partition.words_containing(x, 0, cat_torus.q(Fraction(1, 1000)))) >= 2
