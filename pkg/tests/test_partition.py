from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from services.covers import Rectangle, make_cover_sequence
from services.partition import (
    F_eval,
    PartitionOfUnity,
    empirical_holder,
    empirical_lipschitz,
    f_eval,
    h_eval,
    lipschitz_bound,
    normalization_error,
)
from services.sft import make_bisequence


@pytest.fixture(scope="module")
def cat_covers(cat_model):
    return make_cover_sequence(cat_model)


def test_level_zero_is_constant(sft_lab):
    pou = PartitionOfUnity(sft_lab.covers, 0)
    x = sft_lab.source.enumerate(2)[0]
    assert pou.weights(x) == {Rectangle(0, ()): 1.0}
    assert pou.h(x, Rectangle(0, ())) == 1.0


def test_cylinder_weights_are_indicators(sft_lab):
    pou = PartitionOfUnity(sft_lab.covers, 2)
    x = make_bisequence((0, 1), 0, -2, (0, 0, 1, 0, 0), (0,), 0)
    rect = Rectangle(2, (0, 1, 0))
    assert pou.weights(x) == {rect: 1.0}
    assert h_eval(pou, x, rect) == 1.0
    assert F_eval(pou, x, Rectangle(2, (0, 0, 0))) == 0.0
    assert f_eval(pou, x, rect) == 1.0


def test_wrong_level_is_rejected(sft_lab):
    pou = PartitionOfUnity(sft_lab.covers, 2)
    x = sft_lab.source.enumerate(2)[0]
    with pytest.raises(ValueError):
        pou.h(x, Rectangle(1, (0,)))


def test_cylinder_lipschitz_bound(sft_lab):
    points = sft_lab.source.random_points(40, seed=1)
    pairs = list(zip(points, points[1:]))
    for n in (1, 2, 3):
        pou = PartitionOfUnity(sft_lab.covers, n)
        assert normalization_error(pou, points) == 0.0
        assert lipschitz_bound(pou) == pytest.approx(9 * 2.0 ** (n - 2))
        assert empirical_lipschitz(pou, pairs) <= lipschitz_bound(pou)


def test_torus_partition_of_unity(cat_covers, cat_source):
    points = cat_source.random_points(8, seed=2)
    pou = PartitionOfUnity(cat_covers, 1)
    assert normalization_error(pou, points) < 1e-12
    for x in points:
        weights = pou.weights(x)
        assert all(0.0 < w <= 1.0 for w in weights.values())
        roots = pou.roots(x)
        assert sum(v * v for v in roots.values()) == pytest.approx(1.0)
    torus = cat_covers.backend
    nudge = Fraction(1, 2**12)
    pairs = [(x, torus.make_point(x.x + nudge, x.y)) for x in points]
    assert empirical_lipschitz(pou, pairs) <= lipschitz_bound(pou)
    assert empirical_holder(pou, pairs) >= 0.0


@settings(max_examples=40, deadline=None)
@given(level=st.integers(0, 4), index=st.integers(0, 59))
def test_weights_sum_to_one(sft_lab, level, index):
    x = sft_lab.source.random_points(60, seed=4)[index]
    pou = PartitionOfUnity(sft_lab.covers, level)
    assert sum(pou.weights(x).values()) == pytest.approx(1.0, abs=1e-12)
    assert all(pou.h(x, rect) > 0 for rect in pou.weights(x))
