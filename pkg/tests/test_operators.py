import numpy as np
import pytest

from services.operators import (
    LinearMap,
    TensorWindow,
    combine,
    compression,
    identity,
    restriction,
    section,
    sections,
    tensor,
    zero,
)


def shift_map() -> LinearMap:
    return LinearMap(lambda k: {k + 1: 1.0}, lambda k: {k - 1: 1.0}, "S")


def test_columns_and_adjoints():
    S = shift_map()
    assert S.column(3) == {4: 1.0}
    assert S.adjoint.column(4) == {3: 1.0}
    assert S.adjoint.adjoint is S
    assert (S.adjoint @ S).column(7) == {7: 1.0}
    assert (S @ S).adjoint.column(9) == {7: 1.0}


def test_linear_combinations():
    S = shift_map()
    assert (S + S).column(0) == {1: 2.0}
    assert (S - S).column(0) == {}
    assert (-S).column(0) == {1: -1.0}
    assert (2.5 * S).column(0) == {1: 2.5}
    assert combine([(1.0, S), (1.0, identity())]).adjoint.column(1) == {0: 1.0, 1: 1.0}
    assert zero().column(5) == {}


def test_apply_accumulates():
    S = shift_map()
    assert S.apply({0: 1.0, 1: 2.0}) == {1: 1.0, 2: 2.0}
    assert (S - identity()).apply({0: 1.0, 1: 1.0}) == {0: -1.0, 2: 1.0}


def test_tensor_acts_on_pairs():
    S = shift_map()
    T = tensor(S, identity())
    assert T.column((0, 3)) == {(1, 3): 1.0}
    assert T.adjoint.column((1, 3)) == {(0, 3): 1.0}
    window = TensorWindow({1, 2})
    assert (1, 2) in window
    assert (1, 5) not in window
    assert 1 not in window


def test_sections():
    S = shift_map()
    full = section(S, [0, 1, 2])
    assert full.codomain == (1, 2, 3)
    assert full.window_exact
    assert full.shape == (3, 3)
    assert full.nnz == 3
    assert full.entry(2, 1) == 1.0
    assert full.entry(0, 1) == 0.0
    assert full.T.shape == (3, 3)
    clipped = section(S, [0, 1, 2], {1, 2})
    assert clipped.codomain == (1, 2)
    assert not clipped.window_exact
    assert section(zero(), [0, 1]).is_zero()


def test_shared_row_index():
    S = shift_map()
    a, b = sections([S, identity()], [0, 1])
    assert a.codomain == b.codomain == (0, 1, 2)


def test_compression_is_exact_gram():
    S = shift_map()
    np.testing.assert_array_equal(compression(S, S, [0, 1, 2]), np.eye(3))
    np.testing.assert_array_equal(compression(S, identity(), [0, 1, 2]), np.eye(3, k=1))


def test_restriction_keeps_order():
    S = shift_map()
    np.testing.assert_array_equal(restriction(identity(), [3, 1, 2]), np.eye(3))
    block = restriction(S, [2, 0, 1])
    assert block[0, 2] == 1.0
    assert block[2, 1] == 1.0
    assert block.sum() == pytest.approx(2.0)
