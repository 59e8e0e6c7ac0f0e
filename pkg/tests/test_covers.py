from fractions import Fraction

import pytest

from services.covers import (
    CylinderCoverSequence,
    MarkovCoverSequence,
    Rectangle,
    cover_stats,
    initial_partition,
    make_cover_sequence,
    multiplicity_at,
)
from services.dynamics import SmaleSpaceModel
from services.sft import make_bisequence
from utils.errors import CoverError


@pytest.fixture(scope="module")
def sft_covers(sft_model):
    return make_cover_sequence(sft_model)


@pytest.fixture(scope="module")
def cat_covers(cat_model):
    return make_cover_sequence(cat_model)


def test_cylinder_counts(sft_covers):
    assert isinstance(sft_covers, CylinderCoverSequence)
    assert [sft_covers.count(n) for n in range(5)] == [1, 2, 5, 13, 34]
    for n in range(4):
        assert len(list(sft_covers.cells(n))) == sft_covers.count(n)


def test_cylinder_geometry(sft_covers):
    assert sft_covers.theta == 1
    assert sft_covers.eta == 1
    assert sft_covers.diam(0) == 2
    for n in range(1, 8):
        assert sft_covers.diam(n) == Fraction(1, 2 ** (n - 1))
        assert sft_covers.diam(n) <= Fraction(1, 2 ** (n - 1)) * sft_covers.theta
        assert sft_covers.lebesgue_floor(n) * 2 ** (n - 1) >= sft_covers.eta


def test_cylinders_shrink_below_eps_x_prime(sft_covers):
    eps = sft_covers.backend.eps_x_prime_exact
    assert sft_covers.diam(1) <= sft_covers.backend.eps_x_exact
    assert sft_covers.diam(2) > eps
    assert sft_covers.diam(3) <= eps
    assert sft_covers.base_level == 4


def test_cylinder_membership(sft_covers):
    x = make_bisequence((0, 1), 0, -2, (0, 0, 1, 0, 0), (0,), 0)
    (rect,) = sft_covers.containing(2, x)
    assert rect == Rectangle(2, x.window(-1, 1))
    assert sft_covers.margin(rect, x) == 1
    assert sft_covers.margin(Rectangle(2, (1, 0, 1)), x) is None
    assert sft_covers.containing(0, x) == [Rectangle(0, ())]


def test_restrict_and_shift(sft_covers):
    rect = Rectangle(3, (0, 1, 0, 0, 1))
    assert sft_covers.restrict(rect, 2) == Rectangle(2, (1, 0, 0))
    assert sft_covers.nested(rect, Rectangle(2, (1, 0, 0)))
    assert not sft_covers.nested(rect, Rectangle(2, (0, 0, 1)))
    assert sft_covers.shifted(rect, 1) == Rectangle(2, (0, 0, 1))
    assert sft_covers.shifted(rect, -1) == Rectangle(2, (0, 1, 0))
    assert sft_covers.shifted(rect, 3) == Rectangle(0, ())


def test_shifted_rectangle_contains_images(sft_covers, golden_sft):
    x = make_bisequence((0, 1), 0, -3, (0, 1, 0, 0, 1, 0), (0,), 0)
    (rect,) = sft_covers.containing(3, x)
    for r in (-2, -1, 1, 2):
        assert sft_covers.contains(sft_covers.shifted(rect, r), golden_sft.apply(x, r))


def test_markov_cover_constants(cat_covers, cat_torus):
    assert isinstance(cat_covers, MarkovCoverSequence)
    assert cat_covers.time_scale() == 2
    assert cat_covers.delta > 0
    assert cat_covers.diam(1) <= cat_torus.eps_x_prime_exact
    assert cat_covers.diam(2) <= cat_covers.diam(1) / cat_torus.lam_exact
    assert cat_covers.eta == cat_covers.delta
    assert cat_covers.count(2) > cat_covers.count(1) > 1
    assert cat_covers.base_level == 1


def test_golden_automorphism_cover(golden_torus):
    covers = make_cover_sequence(SmaleSpaceModel.from_backend(golden_torus))
    assert isinstance(covers, MarkovCoverSequence)
    assert covers.time_scale() == 1
    assert covers.diam(1) < golden_torus.eps_x_prime_exact
    assert covers.base_level == 1
    assert covers.count(2) > covers.count(1) > 1


def test_oversized_delta_is_rejected(cat_model):
    with pytest.raises(CoverError):
        make_cover_sequence(cat_model, Fraction(1))
    with pytest.raises(CoverError):
        make_cover_sequence(cat_model, Fraction(-1, 100))


def test_markov_cover_covers_points(cat_covers, cat_source):
    points = cat_source.random_points(10, seed=3)
    first = cat_covers.count(1)
    for n in (1, 2):
        for x in points:
            rects = cat_covers.containing(n, x)
            assert 1 <= len(rects) <= first * first
            for rect in rects:
                assert cat_covers.margin(rect, x) > 0
                assert cat_covers.nested(rect, cat_covers.restrict(rect, n - 1))


def test_cover_stats(sft_covers, sft_lab):
    samples = sft_lab.source.random_points(50, seed=0)
    stats = cover_stats(sft_covers.level(3), samples)
    assert stats["count"] == 13
    assert stats["multiplicity"] == 1
    assert stats["leb_lower_bound"] == pytest.approx(0.5)
    assert stats["diam"] == pytest.approx(0.25)
    assert multiplicity_at(sft_covers.level(3), samples) == 1


def test_initial_partition(sft_model):
    first = initial_partition(sft_model)
    assert first.level == 1
    assert first.count == 2
    with pytest.raises(ValueError):
        make_cover_sequence(sft_model).level(-1)
