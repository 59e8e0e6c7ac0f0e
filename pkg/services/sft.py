"""Subshift-of-finite-type backend.

Points of interest are bi-infinite sequences with periodic tails: a left
tail read from one periodic word, a finite center, and a right tail read
from another periodic word. Tails are phased absolutely, i.e. for i left of
the center x_i = left[(i + left_phase) % len(left)], which makes the shift a
pure bookkeeping update. Canonical forms absorb as much as possible into
the tails, so representation equality is point equality.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterator, Optional, Sequence

import numpy as np
from scipy.sparse import csr_array
from scipy.sparse.csgraph import connected_components

from services.dynamics import SmaleBackend
from utils.errors import ModelError

logger = logging.getLogger(__name__)

Word = tuple[int, ...]


def minimal_rotation(word: Sequence[int]) -> tuple[Word, int]:
    """Lexicographically least rotation and the offset k with rotation = word[k:] + word[:k]."""
    w = tuple(word)
    best_k = min(range(len(w)), key=lambda k: w[k:] + w[:k])
    return w[best_k:] + w[:best_k], best_k


def is_primitive(word: Sequence[int]) -> bool:
    w = tuple(word)
    n = len(w)
    return all(w != w[k:] + w[:k] for k in range(1, n) if n % k == 0)


@dataclass(frozen=True)
class BiSequence:
    left: Word
    left_phase: int
    left_cut: int
    center: Word
    right: Word
    right_phase: int

    @property
    def right_cut(self) -> int:
        return self.left_cut + len(self.center)

    def at(self, i: int) -> int:
        if i < self.left_cut:
            return self.left[(i + self.left_phase) % len(self.left)]
        if i < self.right_cut:
            return self.center[i - self.left_cut]
        return self.right[(i + self.right_phase) % len(self.right)]

    def window(self, lo: int, hi: int) -> Word:
        """Symbols on the index range [lo, hi]."""
        return tuple(self.at(i) for i in range(lo, hi + 1))

    @property
    def is_periodic(self) -> bool:
        return not self.center and self.left == self.right and self.left_phase == self.right_phase

    @cached_property
    def complexity(self) -> int:
        if self.is_periodic:
            return 0
        return max(abs(self.left_cut), abs(self.right_cut))

    @cached_property
    def sort_key(self) -> tuple:
        return (
            self.complexity,
            self.left_cut,
            len(self.center),
            self.center,
            self.left,
            self.left_phase,
            self.right,
            self.right_phase,
        )

    def __lt__(self, other: BiSequence) -> bool:
        return self.sort_key < other.sort_key

    def as_dict(self) -> dict:
        return {
            "left": list(self.left),
            "left_phase": self.left_phase,
            "left_cut": self.left_cut,
            "center": list(self.center),
            "right": list(self.right),
            "right_phase": self.right_phase,
        }

    def __str__(self) -> str:
        left = "".join(map(str, self.left))
        right = "".join(map(str, self.right))
        center = "".join(map(str, self.center))
        return f"({left})^∞.{self.left_cut}[{center}].({right})^∞"


def make_bisequence(
    left: Sequence[int],
    left_phase: int,
    left_cut: int,
    center: Sequence[int],
    right: Sequence[int],
    right_phase: int,
) -> BiSequence:
    """Canonicalize an arbitrary tail/center description."""
    lw, lk = minimal_rotation(left)
    rw, rk = minimal_rotation(right)
    lph = (left_phase - lk) % len(lw)
    rph = (right_phase - rk) % len(rw)
    center = tuple(center)
    lo, hi = left_cut, left_cut + len(center)

    def left_sym(i: int) -> int:
        return lw[(i + lph) % len(lw)]

    def right_sym(i: int) -> int:
        return rw[(i + rph) % len(rw)]

    def sym(i: int) -> int:
        if i < lo:
            return left_sym(i)
        if i < hi:
            return center[i - lo]
        return right_sym(i)

    span = len(lw) * len(rw) + 1
    r = hi
    while r > lo - span and sym(r - 1) == right_sym(r - 1):
        r -= 1
    if r <= lo - span:
        # both tails agree on a full joint period: a periodic point
        return BiSequence(rw, rph, 0, (), rw, rph)
    l_end = lo
    while sym(l_end) == left_sym(l_end):
        l_end += 1
    if l_end <= r:
        return BiSequence(lw, lph, l_end, tuple(sym(i) for i in range(l_end, r)), rw, rph)
    return BiSequence(lw, lph, r, (), rw, rph)


def periodic_point(word: Sequence[int], phase: int = 0) -> BiSequence:
    return make_bisequence(word, phase, 0, (), word, phase)


@dataclass(frozen=True)
class PeriodicOrbit:
    word: Word

    @property
    def length(self) -> int:
        return len(self.word)

    def points(self) -> list[BiSequence]:
        return sorted({periodic_point(self.word, k) for k in range(self.length)})


class SftModel(SmaleBackend):
    kind = "sft"

    def __init__(self, adjacency, metric_base: int = 2):
        matrix = np.asarray(adjacency, dtype=np.int64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
            raise ModelError(f"adjacency must be a non-empty square matrix, got shape {matrix.shape}")
        if not np.isin(matrix, (0, 1)).all():
            raise ModelError("adjacency entries must be 0 or 1")
        if metric_base < 2:
            raise ModelError(f"metric base must be an integer ≥ 2, got {metric_base}")
        n_components, _ = connected_components(csr_array(matrix), directed=True, connection="strong")
        if n_components != 1:
            raise ModelError(f"adjacency is reducible ({n_components} strongly connected components)")
        self.adjacency = matrix
        self.alphabet_size = int(matrix.shape[0])
        self.lambda_metric = int(metric_base)
        self.perron = float(max(abs(np.linalg.eigvals(matrix.astype(float)))))

    def __repr__(self) -> str:
        return f"SftModel(adjacency={self.adjacency.tolist()}, metric_base={self.lambda_metric})"

    @property
    def lam_exact(self) -> Fraction:
        return Fraction(self.lambda_metric)

    @property
    def eps_x_exact(self) -> Fraction:
        # d ≤ 1 iff the sequences agree at coordinate 0, where splicing is admissible
        return Fraction(1)

    @property
    def entropy(self) -> float:
        return math.log(self.perron)

    def allowed(self, a: int, b: int) -> bool:
        return bool(self.adjacency[a, b])

    def is_admissible(self, word: Sequence[int], *, cyclic: bool = False) -> bool:
        pairs = zip(word, word[1:])
        if not all(self.allowed(a, b) for a, b in pairs):
            return False
        return not cyclic or self.allowed(word[-1], word[0])

    def describe(self) -> dict:
        info = super().describe()
        info.update(
            {
                "alphabet_size": self.alphabet_size,
                "adjacency": self.adjacency.tolist(),
                "perron": self.perron,
            }
        )
        return info

    # dynamics

    def apply(self, p: BiSequence, power: int) -> BiSequence:
        if power == 0 or p.is_periodic and power % len(p.left) == 0:
            return p
        if p.is_periodic:
            return periodic_point(p.left, p.left_phase + power)
        return BiSequence(
            p.left,
            (p.left_phase + power) % len(p.left),
            p.left_cut - power,
            p.center,
            p.right,
            (p.right_phase + power) % len(p.right),
        )

    def agreement_radius(self, p: BiSequence, q: BiSequence) -> Optional[int]:
        """Largest m with p, q equal on [-m, m]; -1 if they differ at 0, None if p == q."""
        if p == q:
            return None
        reach = max(abs(p.left_cut), abs(p.right_cut), abs(q.left_cut), abs(q.right_cut))
        limit = reach + len(p.left) * len(p.right) * len(q.left) * len(q.right) + 1
        for n in range(limit + 1):
            if p.at(n) != q.at(n) or p.at(-n) != q.at(-n):
                return n - 1
        raise AssertionError(f"distinct canonical forms describe the same sequence: {p}, {q}")

    def distance(self, p: BiSequence, q: BiSequence) -> Fraction:
        """λ^-m with m the largest symmetric agreement radius (λ when p_0 ≠ q_0)."""
        m = self.agreement_radius(p, q)
        if m is None:
            return Fraction(0)
        return Fraction(self.lambda_metric) ** (-m)

    def splice(self, p: BiSequence, q: BiSequence) -> BiSequence:
        lo = min(q.left_cut, 0)
        hi = max(p.right_cut, 0)
        center = tuple(q.at(i) for i in range(lo, 0)) + tuple(p.at(i) for i in range(0, hi))
        return make_bisequence(q.left, q.left_phase, lo, center, p.right, p.right_phase)

    def orbit_signature(self, p: BiSequence, horizon: int = 0) -> frozenset:
        if p.is_periodic:
            return frozenset({("periodic", p.left)})
        return frozenset(
            {
                (
                    "orbit",
                    p.left,
                    (p.left_phase + p.left_cut) % len(p.left),
                    p.center,
                    p.right,
                    (p.right_phase + p.left_cut) % len(p.right),
                )
            }
        )

    # orbits and enumeration

    def periodic_orbit(self, word: Sequence[int]) -> PeriodicOrbit:
        w = tuple(int(s) for s in word)
        if not w:
            raise ModelError("periodic word must be non-empty")
        if any(s < 0 or s >= self.alphabet_size for s in w):
            raise ModelError(f"periodic word {w} uses symbols outside the alphabet")
        if not is_primitive(w):
            raise ModelError(f"periodic word {w} is a proper power")
        if not self.is_admissible(w, cyclic=True):
            raise ModelError(f"periodic word {w} is not admissible")
        return PeriodicOrbit(minimal_rotation(w)[0])

    def words(self, length: int, after: Optional[int] = None, before: Optional[int] = None) -> Iterator[Word]:
        """Admissible words of the given length, optionally preceded by `after` and followed by `before`."""
        if length == 0:
            if after is None or before is None or self.allowed(after, before):
                yield ()
            return

        def extend(prefix: list[int]) -> Iterator[Word]:
            if len(prefix) == length:
                if before is None or self.allowed(prefix[-1], before):
                    yield tuple(prefix)
                return
            last = prefix[-1] if prefix else after
            for s in range(self.alphabet_size):
                if last is None or self.allowed(last, s):
                    prefix.append(s)
                    yield from extend(prefix)
                    prefix.pop()

        yield from extend([])

    def _check_disjoint(self, P: PeriodicOrbit, Q: PeriodicOrbit) -> None:
        if P.word == Q.word:
            raise ModelError(f"periodic orbits intersect: P = Q = ({''.join(map(str, P.word))})^∞")

    def enumerate_homoclinic(self, P: PeriodicOrbit, Q: PeriodicOrbit, complexity_cap: int) -> list[BiSequence]:
        """All canonical points forward-asymptotic to P and backward-asymptotic to Q within the cap."""
        self._check_disjoint(P, Q)
        found: set[BiSequence] = set()
        for lo in range(-complexity_cap, complexity_cap + 1):
            for hi in range(lo, complexity_cap + 1):
                for lph in range(Q.length):
                    before_sym = Q.word[(lo - 1 + lph) % Q.length]
                    for rph in range(P.length):
                        after_sym = P.word[(hi + rph) % P.length]
                        for center in self.words(hi - lo, after=before_sym, before=after_sym):
                            x = make_bisequence(Q.word, lph, lo, center, P.word, rph)
                            if x.complexity <= complexity_cap and not x.is_periodic:
                                found.add(x)
        points = sorted(found, key=lambda x: x.sort_key)
        logger.debug("enumerated %d homoclinic points at cap %d", len(points), complexity_cap)
        return points

    def homoclinic_in_cylinder(
        self,
        P: PeriodicOrbit,
        Q: PeriodicOrbit,
        word: Sequence[int],
        max_extension: int = 8,
    ) -> Iterator[BiSequence]:
        """Homoclinic points with x_[-L, L] = word, in the global enumeration order.

        `word` has odd length 2L + 1. Points are produced in stages by the
        length of the connectors joining the word to the tails; after stage K
        every point of complexity ≤ L + K is known, so those are released.
        """
        self._check_disjoint(P, Q)
        w = tuple(word)
        if len(w) % 2 != 1:
            raise ValueError(f"cylinder word must have odd length, got {len(w)}")
        radius = len(w) // 2
        pool: set[BiSequence] = set()
        released: set[BiSequence] = set()
        for stage in range(max_extension + 1):
            for kl in range(stage + 1):
                for kr in range(stage + 1):
                    if max(kl, kr) != stage:
                        continue
                    lo = -radius - kl
                    for lph in range(Q.length):
                        q_sym = Q.word[(lo - 1 + lph) % Q.length]
                        for alpha in self.words(kl, after=q_sym, before=w[0]):
                            for rph in range(P.length):
                                p_sym = P.word[(radius + kr + 1 + rph) % P.length]
                                for beta in self.words(kr, after=w[-1], before=p_sym):
                                    x = make_bisequence(Q.word, lph, lo, alpha + w + beta, P.word, rph)
                                    if not x.is_periodic:
                                        pool.add(x)
            bound = radius + stage
            ready = sorted((x for x in pool if x.complexity <= bound and x not in released), key=lambda x: x.sort_key)
            for x in ready:
                released.add(x)
                yield x


def make_sft(adjacency, metric_base: int = 2) -> SftModel:
    return SftModel(adjacency, metric_base=metric_base)


__all__ = [
    "BiSequence",
    "PeriodicOrbit",
    "SftModel",
    "Word",
    "make_bisequence",
    "make_sft",
    "minimal_rotation",
    "is_primitive",
    "periodic_point",
]
