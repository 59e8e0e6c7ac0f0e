"""Refining sequences of δ-enlarged Markov covers R_n^δ.

Level n consists of the non-empty joins of φ^r(R_1^δ) over |r| ≤ n - 1.
Elements are never materialized: a rectangle is named by its itinerary word,
membership is decided from a point's itinerary and counts come from powers
of the transfer matrix. Level 0 is the trivial cover {X}.
"""
from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Optional

import numpy as np

from services.dynamics import Exact, Point, SmaleSpaceModel
from services.homoclinic import HomoclinicSource
from services.markov import partition_for
from services.quadratic import QuadNumber
from services.sft import BiSequence, SftModel
from services.torus import TorusModel, TorusPoint
from utils.errors import CoverError

logger = logging.getLogger(__name__)

_TORUS_START_CAP = 4
_BASE_LEVEL_LIMIT = 64


@dataclass(frozen=True, order=True)
class Rectangle:
    level: int
    key: tuple[int, ...]

    def label(self) -> str:
        return "".join(map(str, self.key)) or "X"


class CoverSequence(ABC):
    """R_n^δ for n ≥ 0 over one model; immutable after construction."""

    def __init__(self, model: SmaleSpaceModel):
        self.model = model

    @property
    def backend(self):
        return self.model.backend

    @property
    @abstractmethod
    def delta(self) -> Exact: ...

    @property
    @abstractmethod
    def eta(self) -> Exact:
        """η with Leb(R_n^δ)·λ^(n-1) ≥ η at every level."""

    @abstractmethod
    def time_scale(self) -> int:
        """Symbol steps per application of φ."""

    @abstractmethod
    def radius(self, n: int) -> int:
        """Half-length of level-n itinerary words."""

    @abstractmethod
    def count(self, n: int) -> int: ...

    @abstractmethod
    def containing(self, n: int, x: Point) -> list[Rectangle]: ...

    @abstractmethod
    def margin(self, rect: Rectangle, x: Point) -> Optional[Exact]:
        """d(x, X ∖ R) for x ∈ R, None for x ∉ R."""

    @abstractmethod
    def diam(self, n: int) -> Exact: ...

    @abstractmethod
    def lebesgue_floor(self, n: int) -> Exact:
        """Certified lower bound for the Lebesgue number of level n."""

    @abstractmethod
    def candidates(self, rect: Rectangle, source: HomoclinicSource, effort: int) -> Iterator[Point]:
        """Homoclinic points of the rectangle in the global enumeration order."""

    @abstractmethod
    def cells(self, n: int) -> Iterator[Rectangle]:
        """All level-n rectangles in lexicographic order."""

    def corners(self, rect: Rectangle) -> list[Point]:
        return []

    @abstractmethod
    def nested(self, inner: Rectangle, outer: Rectangle) -> bool:
        """Exact check that inner ⊆ outer."""

    def contains(self, rect: Rectangle, x: Point) -> bool:
        if rect.level == 0:
            return True
        return self.margin(rect, x) is not None

    @property
    def theta(self) -> Exact:
        return self.diam(1)

    @cached_property
    def base_level(self) -> int:
        """First level with diam < ε'_X; orbit separation holds for |r| ≤ n - base_level."""
        bound = self.backend.eps_x_prime_exact
        for n in range(1, _BASE_LEVEL_LIMIT + 1):
            if self.diam(n) < bound:
                return n
        raise CoverError(f"no level up to {_BASE_LEVEL_LIMIT} has diameter below eps_x' = {float(bound):.6g}")

    def level(self, n: int) -> EnlargedCover:
        if n < 0:
            raise ValueError(f"cover levels start at 0, got {n}")
        return EnlargedCover(level=n, count=self.count(n), sequence=self)

    def restrict(self, rect: Rectangle, n: int) -> Rectangle:
        """The level-n rectangle whose word is the middle of rect's word."""
        if n == 0:
            return Rectangle(0, ())
        cut = self.radius(rect.level) - self.radius(n)
        return Rectangle(n, rect.key[cut: len(rect.key) - cut])

    def shifted(self, rect: Rectangle, r: int) -> Rectangle:
        """The level-(n - |r|) rectangle containing φ^r(rect)."""
        n = rect.level - abs(r)
        if n <= 0:
            return Rectangle(0, ())
        start = self.radius(rect.level) - self.radius(n) + self.time_scale() * r
        return Rectangle(n, rect.key[start: start + 2 * self.radius(n) + 1])


@dataclass(frozen=True)
class EnlargedCover:
    level: int
    count: int
    sequence: CoverSequence

    def containing(self, x: Point) -> list[Rectangle]:
        return self.sequence.containing(self.level, x)

    def contains(self, rect: Rectangle, x: Point) -> bool:
        return self.sequence.contains(rect, x)

    @property
    def diam(self) -> Exact:
        return self.sequence.diam(self.level)

    @property
    def first(self) -> EnlargedCover:
        return self.sequence.level(1)


class CylinderCoverSequence(CoverSequence):
    """Cylinder sets over [-(n-1), n-1]; clopen, so δ plays no role."""

    def __init__(self, model: SmaleSpaceModel):
        super().__init__(model)
        backend: SftModel = model.backend
        self._adjacency = backend.adjacency.astype(object)

    @property
    def delta(self) -> Fraction:
        return Fraction(0)

    @property
    def eta(self) -> Fraction:
        return Fraction(1)

    def time_scale(self) -> int:
        return 1

    def radius(self, n: int) -> int:
        return n - 1

    def _scale(self, n: int) -> Fraction:
        return Fraction(self.backend.lambda_metric) ** (-n)

    def count(self, n: int) -> int:
        if n == 0:
            return 1
        return int(np.linalg.matrix_power(self._adjacency, 2 * n - 2).sum())

    def containing(self, n: int, x: BiSequence) -> list[Rectangle]:
        if n == 0:
            return [Rectangle(0, ())]
        return [Rectangle(n, x.window(-(n - 1), n - 1))]

    def margin(self, rect: Rectangle, x: BiSequence) -> Optional[Fraction]:
        if rect.level == 0:
            return None
        if x.window(-(rect.level - 1), rect.level - 1) != rect.key:
            return None
        # a point outside the cylinder differs within radius n - 1
        return self._scale(rect.level - 2)

    def diam(self, n: int) -> Fraction:
        return self._scale(max(n, 0) - 1)

    def lebesgue_floor(self, n: int) -> Fraction:
        return self._scale(max(n, 1) - 2)

    def candidates(self, rect: Rectangle, source: HomoclinicSource, effort: int) -> Iterator[BiSequence]:
        if rect.level == 0:
            return source.global_order(effort)
        return self.backend.homoclinic_in_cylinder(source.P, source.Q, rect.key, max_extension=effort)

    def cells(self, n: int) -> Iterator[Rectangle]:
        if n == 0:
            yield Rectangle(0, ())
            return
        for word in self.backend.words(2 * n - 1):
            yield Rectangle(n, word)

    def nested(self, inner: Rectangle, outer: Rectangle) -> bool:
        if outer.level == 0:
            return True
        if inner.level < outer.level:
            return False
        return self.restrict(inner, outer.level) == outer


class MarkovCoverSequence(CoverSequence):
    """Joins of the δ-enlarged two-square partition for powers of the golden automorphism.

    R_1 is the join over [-(N-1), N-1] in G-time with N minimal such that the
    closed boxes have diameter at most ε'_X/2; level n uses words over
    [-L_n, L_n] with L_n = q(n-1) + N - 1 and margin δ·λ^(-(n-1)).
    """

    def __init__(self, model: SmaleSpaceModel, delta: Optional[Exact] = None):
        super().__init__(model)
        torus: TorusModel = model.backend
        self.partition = partition_for(torus)
        q = self.partition.power
        target = torus.eps_x_prime_exact / 2
        depth = 1
        while self.partition.closed_diameter(depth - 1) > target:
            depth += 1
        self.depth = depth
        self._q = q
        closed = self.partition.closed_diameter(depth - 1)
        slack = torus.eps_x_prime_exact - closed
        if delta is None:
            chosen = slack / 16
        else:
            chosen = delta if isinstance(delta, QuadNumber) else torus.q(Fraction(delta))
        if chosen < 0:
            raise CoverError(f"delta must be non-negative, got {float(chosen):.6g}")
        if closed + 2 * chosen > torus.eps_x_prime_exact:
            raise CoverError(
                f"delta {float(chosen):.6g} too large: diam(R_1) + 2·delta = {float(closed + 2 * chosen):.6g} "
                f"exceeds eps_x' = {float(torus.eps_x_prime_exact):.6g}"
            )
        self._delta = chosen
        self._margins: dict[int, Exact] = {}
        logger.info(
            "Markov cover: G^%d, R_1 depth %d (%d elements), delta=%.6g",
            q, depth, self.count(1), float(chosen),
        )

    @property
    def delta(self) -> Exact:
        return self._delta

    @property
    def eta(self) -> Exact:
        return self._delta

    def time_scale(self) -> int:
        return self._q

    def radius(self, n: int) -> int:
        return self._q * (n - 1) + self.depth - 1

    def level_margin(self, n: int) -> Exact:
        if n not in self._margins:
            self._margins[n] = self._delta * self.backend.lam_exact ** (-(n - 1))
        return self._margins[n]

    def count(self, n: int) -> int:
        if n == 0:
            return 1
        return self.partition.word_count(self.radius(n))

    def containing(self, n: int, x: TorusPoint) -> list[Rectangle]:
        if n == 0:
            return [Rectangle(0, ())]
        words = self.partition.words_containing(x, self.radius(n), self.level_margin(n))
        return [Rectangle(n, w) for w in words]

    def margin(self, rect: Rectangle, x: TorusPoint) -> Optional[Exact]:
        if rect.level == 0:
            return None
        return self.partition.side_margin(x, rect.key, self.level_margin(rect.level))

    def box(self, rect: Rectangle):
        return self.partition.box(rect.key, self.level_margin(rect.level))

    def diam(self, n: int) -> Exact:
        n = max(n, 1)
        return self.partition.closed_diameter(self.radius(n)) + 2 * self.level_margin(n)

    def lebesgue_floor(self, n: int) -> Exact:
        return self.level_margin(max(n, 1))

    def candidates(self, rect: Rectangle, source: HomoclinicSource, effort: int) -> Iterator[TorusPoint]:
        if rect.level == 0:
            yield from source.global_order(effort)
            return
        u_bounds, s_bounds = self.box(rect)
        released: set[TorusPoint] = set()
        cap = _TORUS_START_CAP
        limit = _TORUS_START_CAP << effort
        while cap <= limit:
            for complexity, x in self.backend.homoclinic_in_box(source.P, source.Q, u_bounds, s_bounds, cap):
                if x not in released:
                    released.add(x)
                    yield x
            cap *= 2

    def cells(self, n: int) -> Iterator[Rectangle]:
        if n == 0:
            yield Rectangle(0, ())
            return
        for word in self.partition.words(self.radius(n)):
            yield Rectangle(n, word)

    def corners(self, rect: Rectangle) -> list[TorusPoint]:
        if rect.level == 0:
            return []
        return self.partition.corners(rect.key)

    def nested(self, inner: Rectangle, outer: Rectangle) -> bool:
        if outer.level == 0:
            return True
        if inner.level < outer.level or self.restrict(inner, outer.level) != outer:
            return False
        (iu, is_), (ou, os_) = self.box(inner), self.box(outer)
        return ou[0] <= iu[0] and iu[1] <= ou[1] and os_[0] <= is_[0] and is_[1] <= os_[1]


def make_cover_sequence(model: SmaleSpaceModel, delta: Optional[Exact] = None) -> CoverSequence:
    if isinstance(model.backend, SftModel):
        return CylinderCoverSequence(model)
    if isinstance(model.backend, TorusModel):
        return MarkovCoverSequence(model, delta)
    raise CoverError(f"no cover construction for backend {model.backend.kind!r}")


def initial_partition(model: SmaleSpaceModel, delta: Optional[Exact] = None) -> EnlargedCover:
    return make_cover_sequence(model, delta).level(1)


def level(cover_seq: CoverSequence, n: int) -> EnlargedCover:
    return cover_seq.level(n)


def multiplicity_at(cover: EnlargedCover, points) -> int:
    return max((len(cover.containing(x)) for x in points), default=0)


def cover_stats(cover: EnlargedCover, samples: list, seed: int = 0) -> dict:
    """diam and count exactly; Lebesgue number and multiplicity over the sample points.

    The Lebesgue estimate is min over samples of the largest margin of a
    rectangle containing the sample; multiplicity also looks at the corners
    of every rectangle met.
    """
    seq = cover.sequence
    n = cover.level
    leb: Optional[float] = None
    multiplicity = 0
    corner_points: set = set()
    for x in samples:
        rects = cover.containing(x)
        if not rects:
            raise CoverError(f"point {x} lies in no level-{n} rectangle")
        multiplicity = max(multiplicity, len(rects))
        if n > 0:
            best = max(float(seq.margin(r, x)) for r in rects)
            leb = best if leb is None else min(leb, best)
        for r in rects:
            corner_points.update(seq.corners(r))
    multiplicity = max(multiplicity, multiplicity_at(cover, sorted(corner_points)))
    logger.debug("level %d stats over %d samples (seed %d)", n, len(samples), seed)
    return {
        "n": n,
        "count": cover.count,
        "diam": float(cover.diam),
        "leb_lower_bound": leb if leb is not None else float("inf"),
        "leb_certified": float(seq.lebesgue_floor(n)),
        "multiplicity": multiplicity,
    }


__all__ = [
    "Rectangle",
    "CoverSequence",
    "EnlargedCover",
    "CylinderCoverSequence",
    "MarkovCoverSequence",
    "make_cover_sequence",
    "initial_partition",
    "level",
    "cover_stats",
    "multiplicity_at",
]
