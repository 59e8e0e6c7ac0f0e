"""The homoclinic set X^h(P, Q) of a backend as an ordered, cap-indexed source."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator

import numpy as np
from scipy.sparse import csr_array
from scipy.sparse.csgraph import shortest_path

from services.dynamics import Point, SmaleSpaceModel
from services.sft import PeriodicOrbit, SftModel, make_bisequence
from services.torus import TorusModel
from utils.errors import ModelError

logger = logging.getLogger(__name__)

_RANDOM_DENOMINATOR = 2**20


@dataclass
class HomoclinicSource:
    model: SmaleSpaceModel
    P: object
    Q: object
    _lists: dict[int, list] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        backend = self.backend
        if isinstance(backend, SftModel):
            if not (isinstance(self.P, PeriodicOrbit) and isinstance(self.Q, PeriodicOrbit)):
                raise ModelError("SFT sources take PeriodicOrbit values for P and Q")
            backend._check_disjoint(self.P, self.Q)
        elif isinstance(backend, TorusModel):
            backend.check_disjoint(self.P, self.Q)

    @property
    def backend(self):
        return self.model.backend

    def enumerate(self, cap: int) -> list:
        if cap not in self._lists:
            self._lists[cap] = self.backend.enumerate_homoclinic(self.P, self.Q, cap)
        return self._lists[cap]

    def global_order(self, max_cap: int) -> Iterator[Point]:
        """Homoclinic points in enumeration order, growing the cap on demand."""
        seen: set = set()
        for cap in range(max_cap + 1):
            for x in self.enumerate(cap):
                if x not in seen:
                    seen.add(x)
                    yield x

    def random_points(self, count: int, seed: int, radius: int = 4) -> list:
        """Deterministic pseudo-random points for sampled checks.

        SFTs get random homoclinic points with a random center of the given
        radius; tori get random dyadic rational points.
        """
        rng = np.random.default_rng(seed)
        backend = self.backend
        if isinstance(backend, TorusModel):
            draws = rng.integers(0, _RANDOM_DENOMINATOR, size=(count, 2))
            return [
                backend.make_point(Fraction(int(a), _RANDOM_DENOMINATOR), Fraction(int(b), _RANDOM_DENOMINATOR))
                for a, b in draws
            ]
        return [self._random_sft_point(backend, radius, rng) for _ in range(count)]

    def _random_sft_point(self, backend: SftModel, radius: int, rng: np.random.Generator):
        P: PeriodicOrbit = self.P
        Q: PeriodicOrbit = self.Q
        lph = int(rng.integers(Q.length))
        lo = -radius
        current = Q.word[(lo - 1 + lph) % Q.length]
        center: list[int] = []
        for _ in range(2 * radius + 1):
            successors = np.flatnonzero(backend.adjacency[current])
            current = int(successors[rng.integers(len(successors))])
            center.append(current)
        target = P.word[0]
        center.extend(_connector(backend, current, target))
        hi = lo + len(center)
        return make_bisequence(Q.word, lph, lo, center, P.word, (-hi) % P.length)


def _connector(backend: SftModel, start: int, target: int) -> list[int]:
    """Shortest symbols c_1..c_k with start → c_1 → … → c_k → target admissible."""
    if backend.allowed(start, target):
        return []
    distances, predecessors = shortest_path(
        csr_array(backend.adjacency), directed=True, unweighted=True, return_predecessors=True, indices=start
    )
    entries = [p for p in range(backend.alphabet_size) if backend.allowed(p, target) and p != start]
    last = min(entries, key=lambda p: (distances[p], p))
    path = [last]
    while path[-1] != start:
        path.append(int(predecessors[path[-1]]))
    path.reverse()
    return path[1:]


def make_source(model: SmaleSpaceModel, P, Q) -> HomoclinicSource:
    return HomoclinicSource(model, P, Q)


__all__ = ["HomoclinicSource", "make_source"]
