"""Basic isometries ι_{n,r}: ℋ → ℋ⊗ℋ and the operators assembled from them.

ι_{n,0}(δ_y) = Σ_k f_{n,k}(y)·δ_{[y, g_{n,k}]} ⊗ δ_{[g_{n,k}, y]} and
ι_{n,r} = (u⊗u)^r ι_{n,0} u^-r. Sample points are drawn from a
``SampleBuilder`` as columns first touch their cells.
"""
from __future__ import annotations

import logging
import math

from services.covers import CoverSequence
from services.dynamics import Point, apply, bracket
from services.groupoid import Bisection, DiagonalBlockFamily, alpha, product_block, rep, unitary_u
from services.operators import LinearMap, combine, tensor
from services.partition import PartitionOfUnity
from services.sampling import SampleBuilder
from utils.constants import DEFAULT_SLOWDOWN

logger = logging.getLogger(__name__)


def c_n(n: int) -> float:
    if n < 0:
        raise ValueError(f"c_n is defined for n ≥ 0, got {n}")
    return math.sqrt((n + 1) * (3 * n + 1))


def gamma(n: int, slowdown: int = DEFAULT_SLOWDOWN) -> int:
    """γ_n = ⌈|n| / slowdown⌉."""
    return -(-abs(n) // slowdown)


def overlap_scalar(n: int, j: int) -> float:
    """a_{n,j} with W*_{n+j} W_n = a_{n,j}·I."""
    if n < 0 or j < 0:
        raise ValueError(f"need n, j ≥ 0, got n={n}, j={j}")
    numerator = max(0, (n + 1 - j) * (3 * n + 1 + j))
    return numerator / math.sqrt((n + 1 + j) * (3 * n + 1 + 3 * j) * (n + 1) * (3 * n + 1))


def shift_scalar(n: int, j: int) -> float:
    """(3n + 1 - j)/(3n + 1) with W*_n (u⊗u)^j W_n = that·u^j, for n ≥ 1."""
    if n < 1:
        raise ValueError(f"the shift identity needs n ≥ 1, got {n}")
    return (3 * n + 1 - abs(j)) / (3 * n + 1)


def difference_norm(scalar: float) -> float:
    """‖A - B‖ for isometries A, B with A*B = scalar·(unitary)."""
    return math.sqrt(max(0.0, 2.0 - 2.0 * scalar))


def zeta(n: int, i: int, k: int, l: int, slowdown: int = DEFAULT_SLOWDOWN) -> float:
    """Scalar with V*_{2n+l}(X⊗Y)V_{2n+k} ≈ ζ_n·Z: matched θ-blocks over the overlap of both averages."""
    g_right = gamma(2 * n + k, slowdown)
    g_left = gamma(2 * n + l, slowdown)
    lo = max(g_right, g_left)
    hi = min(2 * g_right, 2 * g_left)
    total = sum(max(0, 2 * m + 1 - abs(i)) for m in range(lo, hi + 1))
    return total / (c_n(g_right) * c_n(g_left))


def envelope(n: int, lam: float) -> float:
    """λ^(-n/8) + 2^(-n/(8⌈log_λ 3⌉)), the reference decay of the matched blocks."""
    steps = math.ceil(math.log(3) / math.log(lam))
    return lam ** (-n / 8) + 2 ** (-n / (8 * steps))


class IsometryFamily:
    """ι_{n,r} and everything built from them, cached by index."""

    def __init__(self, covers: CoverSequence, sampler: SampleBuilder, *, slowdown: int = DEFAULT_SLOWDOWN):
        self.covers = covers
        self.model = covers.model
        self.sampler = sampler
        self.slowdown = slowdown
        self._pou: dict[int, PartitionOfUnity] = {}
        self._iota: dict[tuple[int, int], LinearMap] = {}
        self._theta: dict[int, LinearMap] = {}
        self._w: dict[int, LinearMap] = {}

    def pou(self, n: int) -> PartitionOfUnity:
        if n not in self._pou:
            self._pou[n] = PartitionOfUnity(self.covers, n)
        return self._pou[n]

    def _pairs(self, n: int, y: Point):
        """(g, f_{n,k}(y)) over the rectangles containing y."""
        for rect, weight in self.pou(n).roots(y).items():
            yield self.sampler.point(rect), weight

    def iota(self, n: int, r: int) -> LinearMap:
        if n == 0 and r == 0:
            return self._cached((0, 0), self._diagonal)
        if n < 1 or abs(r) > n - 1:
            raise ValueError(f"iota needs |r| ≤ n - 1, got n={n}, r={r}")
        return self._cached((n, r), lambda: self._isometry(n, r))

    def _cached(self, key: tuple[int, int], build) -> LinearMap:
        if key not in self._iota:
            self._iota[key] = build()
            logger.debug("built iota_%d,%d", *key)
        return self._iota[key]

    @staticmethod
    def _diagonal() -> LinearMap:
        def column(y: Point) -> dict:
            return {(y, y): 1.0}

        def adjoint_column(pair) -> dict:
            x, z = pair
            return {x: 1.0} if x == z else {}

        return LinearMap(column, adjoint_column, "iota_0,0")

    def _isometry(self, n: int, r: int) -> LinearMap:
        model = self.model

        def column(y: Point) -> dict:
            y0 = apply(model, y, -r)
            out: dict = {}
            for g, weight in self._pairs(n, y0):
                left, right = bracket(model, y0, g), bracket(model, g, y0)
                if left is None or right is None:
                    continue
                key = (apply(model, left, r), apply(model, right, r))
                out[key] = out.get(key, 0.0) + weight
            return out

        def adjoint_column(pair) -> dict:
            x0, z0 = apply(model, pair[0], -r), apply(model, pair[1], -r)
            y0, g0 = bracket(model, x0, z0), bracket(model, z0, x0)
            if y0 is None or g0 is None:
                return {}
            total = 0.0
            for g, weight in self._pairs(n, y0):
                if g == g0 and bracket(model, y0, g) == x0 and bracket(model, g, y0) == z0:
                    total += weight
            return {apply(model, y0, r): total} if total else {}

        return LinearMap(column, adjoint_column, f"iota_{n},{r}")

    def projection(self, n: int, r: int) -> LinearMap:
        """p_{n,r} = ι_{n,r} ι*_{n,r}."""
        op = self.iota(n, r)
        return op @ op.adjoint

    def theta(self, m: int) -> LinearMap:
        """θ_m = Σ_{|r| ≤ m} ι_{2m,r}; θ_0 = ι_{0,0}."""
        if m < 0:
            raise ValueError(f"theta needs m ≥ 0, got {m}")
        if m not in self._theta:
            if m == 0:
                self._theta[m] = self.iota(0, 0)
            else:
                terms = [(1.0, self.iota(2 * m, r)) for r in range(-m, m + 1)]
                self._theta[m] = combine(terms, f"theta_{m}")
        return self._theta[m]

    def bigW(self, n: int) -> LinearMap:
        """W_n = c_n^-1 Σ_{m=n}^{2n} θ_m."""
        if n < 0:
            raise ValueError(f"W_n needs n ≥ 0, got {n}")
        if n not in self._w:
            scale = 1.0 / c_n(n)
            self._w[n] = combine([(scale, self.theta(m)) for m in range(n, 2 * n + 1)], f"W_{n}")
        return self._w[n]

    def V(self, n: int) -> LinearMap:
        """V_n = W_{γ_n}, with V_-n = V_n."""
        return self.bigW(gamma(n, self.slowdown))

    def shifted_w(self, n: int, j: int) -> tuple[LinearMap, LinearMap]:
        """(u⊗u)^j W_n and W_n u^j."""
        u = unitary_u(self.model, j)
        w = self.bigW(n)
        return tensor(u, u) @ w, w @ u

    # difference blocks

    def twisted(self, a: Bisection, b: Bisection, i: int, n: int) -> tuple[LinearMap, LinearMap, LinearMap]:
        """X = α_u^-n(b)u^i, Y = α_s^n(a)u^i and Z = α_u^-n(b)α_s^n(a)u^i."""
        u = unitary_u(self.model, i)
        x = rep(self.model, alpha(b, -n)) @ u
        y = rep(self.model, alpha(a, n)) @ u
        return x, y, product_block(self.model, a, b, n, i)

    def T_block(self, a: Bisection, b: Bisection, i: int, k: int, l: int, n: int) -> LinearMap:
        """T_n = V*_{2n+l}(X ⊗ Y)V_{2n+k} - Z."""
        x, y, z = self.twisted(a, b, i, n)
        return self.V(2 * n + l).adjoint @ tensor(x, y) @ self.V(2 * n + k) - z

    def split_block(self, a: Bisection, b: Bisection, i: int, k: int, l: int, n: int) -> LinearMap:
        """V*_{2n+l}(X ⊗ Y)V_{2n+k} - ζ_n·Z."""
        x, y, z = self.twisted(a, b, i, n)
        scalar = zeta(n, i, k, l, self.slowdown)
        return self.V(2 * n + l).adjoint @ tensor(x, y) @ self.V(2 * n + k) - z.scaled(scalar)

    def matched_block(self, a: Bisection, b: Bisection, i: int, n: int, m: int, r: int) -> LinearMap:
        """ι*_{2m,r+i}(X ⊗ Y)ι_{2m,r} - Z."""
        x, y, z = self.twisted(a, b, i, n)
        return self.iota(2 * m, r + i).adjoint @ tensor(x, y) @ self.iota(2 * m, r) - z

    def cross_block(
        self, a: Bisection, b: Bisection, i: int, n: int, left: tuple[int, int], right: tuple[int, int]
    ) -> LinearMap:
        """ι*_{t,s}(X ⊗ Y)ι_{m,r} for left = (t, s), right = (m, r)."""
        x, y, _ = self.twisted(a, b, i, n)
        return self.iota(*left).adjoint @ tensor(x, y) @ self.iota(*right)

    def t_family(self, a: Bisection, b: Bisection, i: int, k: int, l: int) -> DiagonalBlockFamily:
        return DiagonalBlockFamily(lambda n: self.T_block(a, b, i, k, l, n), name=f"T(i={i},k={k},l={l})")


def admissible_pairs(max_level: int) -> list[tuple[int, int]]:
    """(n, r) with 1 ≤ n ≤ max_level, |r| ≤ n - 1, plus (0, 0)."""
    pairs = [(0, 0)]
    for n in range(1, max_level + 1):
        pairs.extend((n, r) for r in range(-(n - 1), n))
    return pairs


__all__ = [
    "IsometryFamily",
    "c_n",
    "gamma",
    "overlap_scalar",
    "shift_scalar",
    "difference_norm",
    "zeta",
    "envelope",
    "admissible_pairs",
]
