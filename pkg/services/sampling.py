"""Aperiodic samples G = {g_{n,k}} of homoclinic points, one per rectangle.

Cells are visited in lexicographic (n, k) order; each takes the first
homoclinic point of its rectangle whose orbit misses every earlier choice.
Cells can also be filled on demand, which is how operators reach cells that
no window enumeration touched.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional

from services.covers import CoverSequence, Rectangle
from services.dynamics import Point
from services.homoclinic import HomoclinicSource
from utils.errors import CellExhaustedError

logger = logging.getLogger(__name__)


@dataclass
class AperiodicSample:
    points: dict[Rectangle, Point] = field(default_factory=dict)
    provenance: dict[Rectangle, int] = field(default_factory=dict)

    def __getitem__(self, rect: Rectangle) -> Point:
        return self.points[rect]

    def __contains__(self, rect: Rectangle) -> bool:
        return rect in self.points

    def __len__(self) -> int:
        return len(self.points)

    def cells(self) -> list[Rectangle]:
        return sorted(self.points)

    def as_dict(self) -> dict:
        return {
            f"{rect.level}:{rect.label()}": {"index": self.provenance[rect], "point": _describe(self.points[rect])}
            for rect in self.cells()
        }


def _describe(x: Point):
    return x.as_dict() if hasattr(x, "as_dict") else str(x)


class SampleBuilder:
    def __init__(
        self,
        covers: CoverSequence,
        source: HomoclinicSource,
        *,
        horizon: int,
        effort: int,
        reserved: Iterable[Point] = (),
    ):
        self.covers = covers
        self.source = source
        self.horizon = horizon
        self.effort = effort
        self.sample = AperiodicSample()
        self._taken: set = set()
        self._owners: dict = {}
        for x in reserved:
            self._taken |= self._signature(x)

    def _signature(self, x: Point) -> frozenset:
        return self.covers.backend.orbit_signature(x, self.horizon)

    def _aperiodic(self, x: Point, signature: frozenset) -> bool:
        if getattr(x, "is_periodic", False):
            return False
        kind = self.covers.backend.kind
        return kind != "torus" or len(signature) == 2 * self.horizon + 1

    def point(self, rect: Rectangle) -> Point:
        """g for the cell, choosing it now if needed."""
        if rect in self.sample:
            return self.sample[rect]
        for index, x in enumerate(self.covers.candidates(rect, self.source, self.effort)):
            signature = self._signature(x)
            if not self._aperiodic(x, signature) or signature & self._taken:
                continue
            self._taken |= signature
            self.sample.points[rect] = x
            self.sample.provenance[rect] = index
            self._owners[x] = rect
            logger.debug("cell (%d, %s) <- candidate #%d", rect.level, rect.label(), index)
            return x
        raise CellExhaustedError(rect.level, rect.label(), self.effort)

    def owner(self, x: Point) -> Optional[Rectangle]:
        return self._owners.get(x)

    def fill(self, rects: Iterable[Rectangle]) -> AperiodicSample:
        for rect in sorted(set(rects)):
            self.point(rect)
        return self.sample

    def fill_levels(self, max_level: int) -> AperiodicSample:
        for n in range(max_level + 1):
            self.fill(self.covers.cells(n))
        logger.info("sample filled: %d cells up to level %d", len(self.sample), max_level)
        return self.sample

    def fill_touching(self, points: Iterable[Point], max_level: int) -> AperiodicSample:
        """Cells at levels ≤ max_level that contain one of the points."""
        cells: set[Rectangle] = set()
        for x in points:
            for n in range(max_level + 1):
                cells.update(self.covers.containing(n, x))
        self.fill(cells)
        logger.info("sample filled: %d cells touched by %d window points", len(self.sample), len(cells))
        return self.sample


def build_sample(
    cover_seq: CoverSequence,
    source: HomoclinicSource,
    max_level: int,
    *,
    horizon: int,
    effort: int,
    reserved: Iterable[Point] = (),
) -> AperiodicSample:
    builder = SampleBuilder(cover_seq, source, horizon=horizon, effort=effort, reserved=reserved)
    return builder.fill_levels(max_level)


def sample_violations(covers: CoverSequence, sample: AperiodicSample, horizon: int) -> list[str]:
    """Membership, injectivity, aperiodicity and orbit-disjointness, checked exactly."""
    backend = covers.backend
    problems: list[str] = []
    seen: dict = {}
    union: set = set()
    total = 0
    for rect in sample.cells():
        g = sample[rect]
        name = f"({rect.level}, {rect.label()})"
        if not covers.contains(rect, g):
            problems.append(f"{name}: point outside its rectangle")
        if g in seen:
            problems.append(f"{name}: point repeats cell {seen[g]}")
        seen[g] = name
        signature = backend.orbit_signature(g, horizon)
        if getattr(g, "is_periodic", False) or (backend.kind == "torus" and len(signature) != 2 * horizon + 1):
            problems.append(f"{name}: periodic point")
        union |= signature
        total += len(signature)
    if len(union) != total:
        problems.append("two sample points share an orbit")
    return problems


__all__ = ["AperiodicSample", "SampleBuilder", "build_sample", "sample_violations"]
