"""Exact arithmetic in the real quadratic field Q(√D).

Numbers are kept as pairs of Fractions (a, b) meaning a + b√D. Signs and
comparisons are decided exactly; floats appear only through ``float()``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import cached_property, total_ordering
from typing import Union

Rational = Union[int, Fraction]


def squarefree_part(n: int) -> tuple[int, int]:
    """Split a positive integer as k² · D with D square-free; returns (k, D)."""
    if n <= 0:
        raise ValueError(f"expected a positive integer, got {n}")
    k, d = 1, 1
    rest = n
    p = 2
    while p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        k *= p ** (e // 2)
        if e % 2:
            d *= p
        p += 1
    d *= rest
    return k, d


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


@total_ordering
class QuadNumber:
    def __init__(self, a: Rational, b: Rational = 0, d: int = 5) -> None:
        if d <= 1:
            raise ValueError(f"D must be a square-free integer > 1, got {d}")
        self._a: Fraction = Fraction(a)
        self._b: Fraction = Fraction(b)
        self._d: int = d

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @property
    def d(self) -> int:
        return self._d

    def __repr__(self) -> str:
        return f"QuadNumber({self._a}, {self._b}, d={self._d})"

    def __str__(self) -> str:
        if self._b == 0:
            return str(self._a)
        return f"{self._a}{'+' if self._b >= 0 else '-'}{abs(self._b)}√{self._d}"

    def _coerce(self, other: object) -> QuadNumber | None:
        if isinstance(other, QuadNumber):
            if other._d != self._d and other._b != 0 and self._b != 0:
                raise ValueError(f"mixing Q(√{self._d}) with Q(√{other._d})")
            return other
        if isinstance(other, (int, Fraction)):
            return QuadNumber(other, 0, self._d)
        return None

    def _field(self, other: QuadNumber) -> int:
        return self._d if self._b != 0 or other._b == 0 else other._d

    # ring operations

    def __add__(self, other: object) -> QuadNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadNumber(self._a + o._a, self._b + o._b, self._field(o))

    __radd__ = __add__

    def __neg__(self) -> QuadNumber:
        return QuadNumber(-self._a, -self._b, self._d)

    def __sub__(self, other: object) -> QuadNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return QuadNumber(self._a - o._a, self._b - o._b, self._field(o))

    def __rsub__(self, other: object) -> QuadNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other: object) -> QuadNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = self._field(o)
        return QuadNumber(
            self._a * o._a + d * self._b * o._b,
            self._a * o._b + self._b * o._a,
            d,
        )

    __rmul__ = __mul__

    @property
    def conj(self) -> QuadNumber:
        return QuadNumber(self._a, -self._b, self._d)

    @property
    def norm(self) -> Fraction:
        return self._a * self._a - self._d * self._b * self._b

    def inverse(self) -> QuadNumber:
        n = self.norm
        if n == 0:
            raise ZeroDivisionError("QuadNumber division by zero")
        return QuadNumber(self._a / n, -self._b / n, self._d)

    def __truediv__(self, other: object) -> QuadNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other: object) -> QuadNumber:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, exponent: int) -> QuadNumber:
        if exponent < 0:
            return self.inverse() ** (-exponent)
        result = QuadNumber(1, 0, self._d)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    # order

    @cached_property
    def sign(self) -> int:
        sa, sb = _sign(self._a), _sign(self._b)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: the larger magnitude wins
        return sa if self._a * self._a > self._d * self._b * self._b else sb

    def __abs__(self) -> QuadNumber:
        return -self if self.sign < 0 else self

    def __eq__(self, other: object) -> bool:
        try:
            o = self._coerce(other)
        except ValueError:
            return False
        if o is None:
            return NotImplemented
        return self._a == o._a and self._b == o._b

    def __lt__(self, other: object) -> bool:
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return (self - o).sign < 0

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b, self._d))

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def is_rational(self) -> bool:
        return self._b == 0

    # conversions

    def __float__(self) -> float:
        if self._b == 0:
            return float(self._a)
        root = math.sqrt(self._d)
        if _sign(self._a) * _sign(self._b) >= 0:
            return float(self._a) + float(self._b) * root
        # a + b√D = norm / (a - b√D), avoiding cancellation
        return float(self.norm) / (float(self._a) - float(self._b) * root)

    def floor(self) -> int:
        n = math.floor(float(self))
        while self < n:
            n -= 1
        while self >= n + 1:
            n += 1
        return n

    def frac(self) -> QuadNumber:
        """Fractional part, exactly in [0, 1)."""
        return self - self.floor()


__all__ = ["QuadNumber", "squarefree_part"]
