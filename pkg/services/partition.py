"""Lipschitz partitions of unity subordinate to R_n^δ.

h_{n,k}(x) = d(x, X ∖ R_{n,k}^δ), F_{n,k} = h_{n,k} / Σ_j h_{n,j} and
f_{n,k} = √F_{n,k}. Membership and margins are exact; values are floats.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from services.covers import CoverSequence, Rectangle
from services.dynamics import Point, dist

logger = logging.getLogger(__name__)


@dataclass
class PartitionOfUnity:
    covers: CoverSequence
    level: int
    _weights: dict = field(default_factory=dict, repr=False)

    @property
    def model(self):
        return self.covers.model

    def h(self, x: Point, rect: Rectangle) -> float:
        if rect.level != self.level:
            raise ValueError(f"rectangle {rect} is not at level {self.level}")
        if self.level == 0:
            return 1.0
        margin = self.covers.margin(rect, x)
        return 0.0 if margin is None else float(margin)

    def weights(self, x: Point) -> dict[Rectangle, float]:
        """F_{n,k}(x) for every rectangle containing x (all others vanish)."""
        if x not in self._weights:
            rects = self.covers.containing(self.level, x)
            margins = {r: self.h(x, r) for r in rects}
            total = sum(margins.values())
            if total <= 0:
                raise ValueError(f"point {x} has no positive margin at level {self.level}")
            self._weights[x] = {r: m / total for r, m in margins.items()}
        return self._weights[x]

    def F(self, x: Point, rect: Rectangle) -> float:
        return self.weights(x).get(rect, 0.0)

    def f(self, x: Point, rect: Rectangle) -> float:
        return math.sqrt(self.F(x, rect))

    def roots(self, x: Point) -> dict[Rectangle, float]:
        return {r: math.sqrt(w) for r, w in self.weights(x).items()}


def h_eval(pou: PartitionOfUnity, x: Point, rect: Rectangle) -> float:
    return pou.h(x, rect)


def F_eval(pou: PartitionOfUnity, x: Point, rect: Rectangle) -> float:
    return pou.F(x, rect)


def f_eval(pou: PartitionOfUnity, x: Point, rect: Rectangle) -> float:
    return pou.f(x, rect)


def lipschitz_bound(pou: PartitionOfUnity) -> float:
    """(2·(#R_1^δ)² + 1) / Leb(R_n^δ), with the certified Lebesgue floor."""
    first = pou.covers.count(1)
    return (2 * first * first + 1) / float(pou.covers.lebesgue_floor(pou.level))


def _ratios(pou: PartitionOfUnity, pairs: Iterable[tuple[Point, Point]], values) -> float:
    worst = 0.0
    for x, y in pairs:
        if x == y:
            continue
        d = dist(pou.model, x, y)
        wx, wy = values(x), values(y)
        for rect in set(wx) | set(wy):
            worst = max(worst, abs(wx.get(rect, 0.0) - wy.get(rect, 0.0)) / d)
    return worst


def empirical_lipschitz(pou: PartitionOfUnity, pairs: Sequence[tuple[Point, Point]], seed: int = 0) -> float:
    """Largest |F(x) - F(y)| / d(x, y) over the given pairs, across all rectangles."""
    value = _ratios(pou, pairs, pou.weights)
    logger.debug("level %d empirical Lipschitz %.6g over %d pairs (seed %d)", pou.level, value, len(pairs), seed)
    return value


def empirical_holder(pou: PartitionOfUnity, pairs: Sequence[tuple[Point, Point]]) -> float:
    """Largest |f(x) - f(y)| / d(x, y)^(1/2) over the pairs."""
    worst = 0.0
    for x, y in pairs:
        if x == y:
            continue
        root = math.sqrt(dist(pou.model, x, y))
        fx, fy = pou.roots(x), pou.roots(y)
        for rect in set(fx) | set(fy):
            worst = max(worst, abs(fx.get(rect, 0.0) - fy.get(rect, 0.0)) / root)
    return worst


def normalization_error(pou: PartitionOfUnity, points: Iterable[Point]) -> float:
    return max((abs(sum(pou.weights(x).values()) - 1.0) for x in points), default=0.0)


__all__ = [
    "PartitionOfUnity",
    "h_eval",
    "F_eval",
    "f_eval",
    "lipschitz_bound",
    "empirical_lipschitz",
    "empirical_holder",
    "normalization_error",
]
