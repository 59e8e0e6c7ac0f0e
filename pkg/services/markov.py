"""Two-square Markov partition of the golden automorphism G = [[1, 1], [1, 0]].

Everything is written in the eigen coordinates (u, s) of the torus model, so
the partition also serves any power G^q (the cat map is G²). The lattice
sends e1 to (A, B) and e2 to (B, -A); the squares [0, A]² and [A, A + B] ×
[0, B] tile a fundamental domain, and G acts as (u, s) ↦ (μu, -s/μ).

Itineraries are read in G-time. A word w over [-L, L] names the box of
points whose lifts follow w: its u-interval is fixed by w_0..w_L and its
s-interval by w_-L..w_0.
"""
from __future__ import annotations

import itertools
import logging
from functools import lru_cache
from typing import Iterator, Optional, Sequence

import numpy as np

from services.quadratic import QuadNumber
from services.torus import TorusModel, TorusPoint
from utils.constants import GOLDEN_MATRIX
from utils.errors import CoverError

logger = logging.getLogger(__name__)

Interval = tuple[QuadNumber, QuadNumber]
Word = tuple[int, ...]

TILE_A, TILE_B = 0, 1
_LIFT_RANGE = 3
_MAX_POWER = 12


def golden_power(matrix: Sequence[Sequence[int]]) -> Optional[int]:
    """q ≥ 1 with matrix = G^q, or None."""
    target = tuple(tuple(int(v) for v in row) for row in matrix)
    g = np.array(GOLDEN_MATRIX, dtype=object)
    current = g
    for q in range(1, _MAX_POWER + 1):
        if tuple(tuple(int(v) for v in row) for row in current) == target:
            return q
        current = current.dot(g)
    return None


def _widen(interval: Interval, margin: QuadNumber) -> Interval:
    return interval[0] - margin, interval[1] + margin


def _inside(value: QuadNumber, interval: Interval) -> bool:
    return interval[0] < value < interval[1]


class TwoSquarePartition:
    def __init__(self, torus: TorusModel):
        q = golden_power(torus.matrix)
        if q is None:
            raise CoverError(
                f"Markov partition geometry is available for powers of {list(map(list, GOLDEN_MATRIX))} only, "
                f"got {[list(r) for r in torus.matrix]}"
            )
        self.torus = torus
        self.power = q
        self.mu = QuadNumber(1, 1, 5) / 2
        self.mu_s = -(self.mu.inverse())
        (a_len, b_len), e2 = torus.lattice_eigen(1, 0), torus.lattice_eigen(0, 1)
        if e2 != (b_len, -a_len):
            raise CoverError("eigenbasis of the torus model is not the symmetric golden frame")
        self.a_len, self.b_len = a_len, b_len
        zero = torus.q(0)
        self.tiles: dict[int, tuple[Interval, Interval]] = {
            TILE_A: ((zero, a_len), (zero, a_len)),
            TILE_B: ((a_len, a_len + b_len), (zero, b_len)),
        }
        self.kappa = self._crossings()
        self.transfer = np.zeros((2, 2), dtype=np.int64)
        for i, j in self.kappa:
            self.transfer[i, j] = 1
        logger.debug("two-square partition for G^%d: transfer %s", q, self.transfer.tolist())

    def _image(self, label: int) -> tuple[Interval, Interval]:
        (u_lo, u_hi), (s_lo, s_hi) = self.tiles[label]
        s_ends = sorted((self.mu_s * s_lo, self.mu_s * s_hi))
        return (self.mu * u_lo, self.mu * u_hi), (s_ends[0], s_ends[1])

    def _crossings(self) -> dict[tuple[int, int], tuple[QuadNumber, QuadNumber]]:
        """Lattice offsets κ(i, j) with G(tile i) crossing tile j + κ in the Markov way."""
        found: dict[tuple[int, int], tuple[QuadNumber, QuadNumber]] = {}
        for i, j in itertools.product(self.tiles, repeat=2):
            (iu_lo, iu_hi), (is_lo, is_hi) = self._image(i)
            (ju_lo, ju_hi), (js_lo, js_hi) = self.tiles[j]
            for m in itertools.product(range(-_LIFT_RANGE, _LIFT_RANGE + 1), repeat=2):
                ku, ks = self.torus.lattice_eigen(*m)
                full_u = iu_lo <= ju_lo + ku and ju_hi + ku <= iu_hi
                full_s = js_lo + ks <= is_lo and is_hi <= js_hi + ks
                if full_u and full_s:
                    if (i, j) in found:
                        raise CoverError(f"tile {i} crosses tile {j} twice")
                    found[(i, j)] = (ku, ks)
        covered = {i: sum(self.tiles[j][0][1] - self.tiles[j][0][0] for (k, j) in found if k == i) for i in self.tiles}
        for i, width in covered.items():
            image_u = self._image(i)[0]
            if width != image_u[1] - image_u[0]:
                raise CoverError(f"image of tile {i} is not covered by full crossings")
        return found

    # symbolic geometry

    def u_interval(self, forward: Word) -> Interval:
        """u-interval of w_0..w_L, read back from the end."""
        lo, hi = self.tiles[forward[-1]][0]
        for t in range(len(forward) - 2, -1, -1):
            ku, _ = self.kappa[(forward[t], forward[t + 1])]
            lo, hi = (lo + ku) / self.mu, (hi + ku) / self.mu
        return lo, hi

    def s_interval(self, backward: Word) -> Interval:
        """s-interval of w_-L..w_0 (given in increasing time order)."""
        lo, hi = self.tiles[backward[0]][1]
        for t in range(len(backward) - 1):
            _, ks = self.kappa[(backward[t], backward[t + 1])]
            a, b = self.mu_s * lo - ks, self.mu_s * hi - ks
            lo, hi = (a, b) if a < b else (b, a)
        return lo, hi

    def box(self, word: Word, margin: QuadNumber) -> tuple[Interval, Interval]:
        radius = len(word) // 2
        u = self.u_interval(word[radius:])
        s = self.s_interval(word[: radius + 1])
        return _widen(u, margin), _widen(s, margin)

    def closed_diameter(self, radius: int) -> QuadNumber:
        return self.a_len * self.mu ** (-radius)

    def word_count(self, radius: int) -> int:
        power = np.linalg.matrix_power(self.transfer.astype(object), 2 * radius)
        return int(power.sum())

    def words(self, radius: int) -> Iterator[Word]:
        """All admissible words over [-radius, radius] in lexicographic order."""
        def extend(prefix: list[int]) -> Iterator[Word]:
            if len(prefix) == 2 * radius + 1:
                yield tuple(prefix)
                return
            for s in (TILE_A, TILE_B):
                if not prefix or self.transfer[prefix[-1], s]:
                    prefix.append(s)
                    yield from extend(prefix)
                    prefix.pop()

        yield from extend([])

    # locating points

    def lifts(self, x: TorusPoint, label: int, margin: QuadNumber) -> Iterator[tuple[QuadNumber, QuadNumber]]:
        """Eigen coordinates of the plane lifts of x inside the widened tile."""
        u_range, s_range = (_widen(iv, margin) for iv in self.tiles[label])
        bounds = [float(v) for v in (*u_range, *s_range)]
        (i00, i01), (i10, i11) = self.torus.float_inverse
        fx, fy = float(x.x), float(x.y)
        for m in itertools.product(range(-_LIFT_RANGE, _LIFT_RANGE + 1), repeat=2):
            ex, ey = fx + m[0], fy + m[1]
            fu, fs = i00 * ex + i01 * ey, i10 * ex + i11 * ey
            if not (bounds[0] - 1e-9 <= fu <= bounds[1] + 1e-9 and bounds[2] - 1e-9 <= fs <= bounds[3] + 1e-9):
                continue
            u, s = self.torus.to_eigen(x.x + m[0], x.y + m[1])
            if _inside(u, u_range) and _inside(s, s_range):
                yield u, s

    def _forward_words(self, u: QuadNumber, label: int, steps: int, margin: QuadNumber) -> list[Word]:
        if steps == 0:
            return [()]
        found: list[Word] = []
        for nxt in (TILE_A, TILE_B):
            if not self.transfer[label, nxt]:
                continue
            ku, _ = self.kappa[(label, nxt)]
            u_next = self.mu * u - ku
            grown = margin * self.mu
            if _inside(u_next, _widen(self.tiles[nxt][0], grown)):
                found.extend((nxt,) + tail for tail in self._forward_words(u_next, nxt, steps - 1, grown))
        return found

    def _backward_words(self, s: QuadNumber, label: int, steps: int, margin: QuadNumber) -> list[Word]:
        if steps == 0:
            return [()]
        found: list[Word] = []
        for prev in (TILE_A, TILE_B):
            if not self.transfer[prev, label]:
                continue
            _, ks = self.kappa[(prev, label)]
            s_prev = (s + ks) / self.mu_s
            grown = margin * self.mu
            if _inside(s_prev, _widen(self.tiles[prev][1], grown)):
                found.extend(head + (prev,) for head in self._backward_words(s_prev, prev, steps - 1, grown))
        return found

    def words_containing(self, x: TorusPoint, radius: int, margin: QuadNumber) -> list[Word]:
        """Words over [-radius, radius] whose widened box contains x."""
        found: set[Word] = set()
        for label in self.tiles:
            for u, s in self.lifts(x, label, margin):
                forward = self._forward_words(u, label, radius, margin)
                if not forward:
                    continue
                backward = self._backward_words(s, label, radius, margin)
                found.update(head + (label,) + tail for head in backward for tail in forward)
        return sorted(found)

    def lift_in_box(self, x: TorusPoint, word: Word, margin: QuadNumber) -> Optional[tuple[QuadNumber, QuadNumber]]:
        (u_range, s_range) = self.box(word, margin)
        label = word[len(word) // 2]
        for u, s in self.lifts(x, label, margin):
            if _inside(u, u_range) and _inside(s, s_range):
                return u, s
        return None

    def side_margin(self, x: TorusPoint, word: Word, margin: QuadNumber) -> Optional[QuadNumber]:
        """Distance from x to the complement of the widened box, or None outside it."""
        lift = self.lift_in_box(x, word, margin)
        if lift is None:
            return None
        (u_lo, u_hi), (s_lo, s_hi) = self.box(word, margin)
        u, s = lift
        return min(u - u_lo, u_hi - u, s - s_lo, s_hi - s)

    def corners(self, word: Word) -> list[TorusPoint]:
        (u_lo, u_hi), (s_lo, s_hi) = self.box(word, self.torus.q(0))
        return [self.torus.point_from_eigen(u, s) for u in (u_lo, u_hi) for s in (s_lo, s_hi)]


@lru_cache(maxsize=8)
def partition_for(torus: TorusModel) -> TwoSquarePartition:
    return TwoSquarePartition(torus)


__all__ = ["TwoSquarePartition", "golden_power", "partition_for", "TILE_A", "TILE_B"]
