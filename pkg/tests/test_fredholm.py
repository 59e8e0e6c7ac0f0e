import math
from dataclasses import replace

import numpy as np
import pytest

from services.fredholm import (
    admissible_pairs,
    c_n,
    difference_norm,
    envelope,
    gamma,
    overlap_scalar,
    shift_scalar,
    zeta,
)
from services.groupoid import constant_value, rep, unitary_u
from services.operators import compression, restriction, section
from services.verify import numerical_rank, spectral_norm


def test_normalizing_constants():
    assert c_n(0) == 1.0
    assert c_n(4) == pytest.approx(math.sqrt(65))
    with pytest.raises(ValueError):
        c_n(-1)


def test_gamma():
    assert gamma(0) == 0
    assert gamma(1) == 1
    assert gamma(16) == 1
    assert gamma(17) == 2
    assert gamma(-17) == 2
    assert gamma(5, slowdown=2) == 3


def test_overlap_scalar():
    assert overlap_scalar(4, 1) == pytest.approx(56 / math.sqrt(6240))
    assert overlap_scalar(4, 1) == pytest.approx(0.70892, abs=1e-5)
    assert difference_norm(overlap_scalar(4, 1)) == pytest.approx(0.76300, abs=1e-5)
    assert overlap_scalar(1, 1) == pytest.approx(5 / math.sqrt(168))
    assert overlap_scalar(3, 0) == pytest.approx(1.0)
    assert overlap_scalar(1, 5) == 0.0
    with pytest.raises(ValueError):
        overlap_scalar(-1, 1)


def test_shift_scalar():
    assert shift_scalar(4, 1) == pytest.approx(12 / 13)
    assert difference_norm(shift_scalar(4, 1)) == pytest.approx(0.39223, abs=1e-5)
    assert shift_scalar(2, -1) == shift_scalar(2, 1)
    with pytest.raises(ValueError):
        shift_scalar(0, 1)


@pytest.mark.parametrize("n", [0, 1, 8, 40])
def test_zeta_is_one_on_the_matched_diagonal(n):
    assert zeta(n, 0, 0, 0) == pytest.approx(1.0)
    assert zeta(n, 0, 2, 2) == pytest.approx(1.0)


def test_zeta_with_twist():
    assert zeta(40, 1, 0, 0) < 1.0
    assert zeta(40, 1, 0, 0) > 0.0


def test_envelope_decays():
    values = [envelope(n, 2.0) for n in range(1, 40)]
    assert all(a > b for a, b in zip(values, values[1:]))


def test_admissible_pairs():
    assert admissible_pairs(2) == [(0, 0), (1, 0), (2, -1), (2, 0), (2, 1)]


@pytest.fixture(scope="module")
def family(sft_lab):
    return sft_lab.family


@pytest.fixture(scope="module")
def domain(sft_lab):
    return sft_lab.domain(6)


def test_iota_index_range(family):
    with pytest.raises(ValueError):
        family.iota(1, 1)
    with pytest.raises(ValueError):
        family.iota(2, -2)
    with pytest.raises(ValueError):
        family.theta(-1)


def test_diagonal_isometry(family, domain):
    iota = family.iota(0, 0)
    x = domain[0]
    assert iota.column(x) == {(x, x): 1.0}
    assert iota.adjoint.column((x, x)) == {x: 1.0}
    assert iota.adjoint.column((x, domain[1])) == {}


@pytest.mark.parametrize("n,r", [(1, 0), (2, -1), (2, 0), (2, 1), (3, 2)])
def test_iota_is_an_isometry(family, domain, n, r):
    gram = compression(family.iota(n, r), family.iota(n, r), domain)
    np.testing.assert_allclose(gram, np.eye(len(domain)), atol=1e-12)


def test_iota_adjoint_matches_columns(family, domain):
    op = family.iota(2, 1)
    for y in domain:
        for key, value in op.column(y).items():
            assert op.adjoint.column(key).get(y) == pytest.approx(value)


def test_ranges_are_orthogonal(family, domain):
    pairs = admissible_pairs(2)
    for left in pairs:
        for right in pairs:
            if left != right:
                block = section(family.iota(*left).adjoint @ family.iota(*right), domain)
                assert block.is_zero()


def test_theta_and_w(family, domain):
    size = len(domain)
    np.testing.assert_allclose(compression(family.theta(1), family.theta(1), domain), 3 * np.eye(size), atol=1e-12)
    np.testing.assert_allclose(compression(family.bigW(1), family.bigW(1), domain), np.eye(size), atol=1e-12)
    assert family.V(16) is family.bigW(1)
    assert family.V(-16) is family.bigW(1)


def test_quasi_invariance_closed_forms(sft_lab, family, domain):
    size = len(domain)
    a = overlap_scalar(1, 1)
    gram = compression(family.bigW(2), family.bigW(1), domain)
    np.testing.assert_allclose(gram, a * np.eye(size), atol=1e-10)
    measured = spectral_norm(section(family.bigW(2) - family.bigW(1), domain))
    assert measured == pytest.approx(difference_norm(a), abs=1e-6)

    c = shift_scalar(1, 1)
    moved, twisted = family.shifted_w(1, 1)
    block = compression(family.bigW(1), moved, domain)
    np.testing.assert_allclose(block, c * restriction(unitary_u(sft_lab.model, 1), domain), atol=1e-10)


def test_t_family_blocks(sft_lab, family, domain):
    a, b = sft_lab.stable[0], sft_lab.unstable[0]
    blocks = family.t_family(a, b, 0, 0, 0)
    assert blocks[1] is blocks[1]
    x, y, z = family.twisted(a, b, 0, 1)
    assert z.name
    assert math.isfinite(spectral_norm(section(blocks[1], domain)))
    assert section(blocks[1] - family.T_block(a, b, 0, 0, 0, 1), domain).is_zero()


def test_stable_times_unstable_has_rank_at_most_one(sft_lab, domain):
    model = sft_lab.model
    pairs = list(zip(sft_lab.stable, sft_lab.unstable))[:5]
    assert pairs
    for a, b in pairs:
        assert numerical_rank(section(rep(model, a) @ rep(model, b), domain)) <= 1


def test_zero_valued_bisection_gives_zero_blocks(sft_lab, family, domain):
    a, b = sft_lab.stable[0], sft_lab.unstable[0]
    silent = replace(a, value=constant_value(0.0))
    for n in (0, 1, 2):
        assert section(family.T_block(silent, b, 0, 0, 0, n), domain).is_zero()


def test_mismatched_blocks_vanish_for_large_n(sft_lab, family, domain):
    a, b = sft_lab.stable[0], sft_lab.unstable[0]
    pairs = admissible_pairs(2)
    for left in pairs:
        for right in pairs:
            if left != right:
                assert section(family.cross_block(a, b, 0, 16, left, right), domain).is_zero()


@pytest.mark.parametrize("r", [-1, 0, 1])
def test_matched_blocks_sit_under_the_envelope(sft_lab, family, domain, r):
    a, b = sft_lab.stable[0], sft_lab.unstable[0]
    measured = spectral_norm(section(family.matched_block(a, b, 0, 16, 1, r), domain))
    assert measured <= envelope(16, sft_lab.model.lam) + 1e-9
