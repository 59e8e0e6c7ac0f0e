"""Hyperbolic toral automorphisms with exact coordinates in Q(√D).

A point is a pair of QuadNumbers in [0, 1)². Local geometry is read in the
eigenbasis (v_u, v_s): the metric is the max of |u| and |s| over the nearest
lattice representative, and the bracket swaps coordinates in that chart.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from services.dynamics import SmaleBackend
from services.quadratic import QuadNumber, squarefree_part
from utils.errors import DegenerateInputError, ModelError

logger = logging.getLogger(__name__)

_SEARCH = 3
_FLOAT_SLACK = 1e-9


@dataclass(frozen=True, order=True)
class TorusPoint:
    x: QuadNumber
    y: QuadNumber

    def as_dict(self) -> dict:
        return {"x": [str(self.x.a), str(self.x.b)], "y": [str(self.y.a), str(self.y.b)], "d": self.x.d}

    def __str__(self) -> str:
        return f"({self.x}, {self.y})"


def point(x, y, d: int) -> TorusPoint:
    """Reduce a plane vector to its canonical representative in [0, 1)²."""
    qx = x if isinstance(x, QuadNumber) else QuadNumber(x, 0, d)
    qy = y if isinstance(y, QuadNumber) else QuadNumber(y, 0, d)
    return TorusPoint(qx.frac(), qy.frac())


class TorusModel(SmaleBackend):
    kind = "torus"

    def __init__(self, matrix: Sequence[Sequence[int]]):
        m = np.asarray(matrix)
        if m.shape != (2, 2) or not all(float(v).is_integer() for v in m.ravel()):
            raise ModelError(f"torus matrix must be a 2×2 integer matrix, got {matrix!r}")
        (a, b), (c, d) = [[int(v) for v in row] for row in m.tolist()]
        det = a * d - b * c
        trace = a + d
        if det not in (1, -1):
            raise ModelError(f"determinant must be ±1, got {det}")
        # λ² − tλ + det has a root on the unit circle iff |t| ≤ 2 (det = 1) or t = 0 (det = −1)
        if (det == 1 and abs(trace) <= 2) or (det == -1 and trace == 0):
            raise ModelError(f"matrix is not hyperbolic: trace {trace} with determinant {det}")
        self.matrix = ((a, b), (c, d))
        self.det = det
        self.trace = trace
        k, root_d = squarefree_part(trace * trace - 4 * det)
        self.D = root_d
        sign = 1 if trace > 0 else -1
        self.mu_u = (QuadNumber(trace, sign * k, root_d)) / 2
        self.mu_s = QuadNumber(det, 0, root_d) / self.mu_u
        self.v_u = (QuadNumber(b, 0, root_d), self.mu_u - a)
        if b == c:
            self.v_s = (self.mu_u - a, QuadNumber(-b, 0, root_d))
        else:
            self.v_s = (QuadNumber(b, 0, root_d), self.mu_s - a)
        self._basis_det = self.v_u[0] * self.v_s[1] - self.v_s[0] * self.v_u[1]
        det_f = float(self._basis_det)
        self.float_inverse = (
            (float(self.v_s[1]) / det_f, -float(self.v_s[0]) / det_f),
            (-float(self.v_u[1]) / det_f, float(self.v_u[0]) / det_f),
        )
        self._powers: dict[int, tuple[tuple[int, int], tuple[int, int]]] = {}
        self._eps_x = self._injectivity_quarter()
        logger.debug("torus model %s: mu_u=%s, D=%d", self.matrix, self.mu_u, self.D)

    def __repr__(self) -> str:
        return f"TorusModel(matrix={[list(r) for r in self.matrix]})"

    # constants

    @property
    def lam_exact(self) -> QuadNumber:
        return abs(self.mu_u)

    @property
    def eps_x_exact(self) -> QuadNumber:
        return self._eps_x

    @property
    def entropy(self) -> float:
        return math.log(float(self.lam_exact))

    def describe(self) -> dict:
        info = super().describe()
        info.update({"matrix": [list(r) for r in self.matrix], "D": self.D, "mu_u": float(self.mu_u)})
        return info

    # coordinates

    def q(self, value) -> QuadNumber:
        return value if isinstance(value, QuadNumber) else QuadNumber(value, 0, self.D)

    def to_eigen(self, x, y) -> tuple[QuadNumber, QuadNumber]:
        """(u, s) with (x, y) = u·v_u + s·v_s."""
        (ux, uy), (sx, sy) = self.v_u, self.v_s
        u = (sy * x - sx * y) / self._basis_det
        s = (ux * y - uy * x) / self._basis_det
        return u, s

    def from_eigen(self, u, s) -> tuple[QuadNumber, QuadNumber]:
        return (u * self.v_u[0] + s * self.v_s[0], u * self.v_u[1] + s * self.v_s[1])

    def lattice_eigen(self, m1: int, m2: int) -> tuple[QuadNumber, QuadNumber]:
        return self.to_eigen(self.q(m1), self.q(m2))

    def make_point(self, x, y) -> TorusPoint:
        return point(self.q(x), self.q(y), self.D)

    def point_from_eigen(self, u, s) -> TorusPoint:
        x, y = self.from_eigen(u, s)
        return point(x, y, self.D)

    def _injectivity_quarter(self) -> QuadNumber:
        best: Optional[QuadNumber] = None
        for m1, m2 in itertools.product(range(-6, 7), repeat=2):
            if (m1, m2) == (0, 0):
                continue
            u, s = self.lattice_eigen(m1, m2)
            norm = max(abs(u), abs(s))
            if best is None or norm < best:
                best = norm
        return best / 4

    def _representatives(self, p: TorusPoint, q: TorusPoint) -> list[tuple[QuadNumber, QuadNumber]]:
        """Eigen coordinates of the lattice representatives of p − q with minimal max-norm."""
        dx, dy = p.x - q.x, p.y - q.y
        fx, fy = float(dx), float(dy)
        (i00, i01), (i10, i11) = self.float_inverse
        scored = []
        for m1, m2 in itertools.product(range(-_SEARCH, _SEARCH + 1), repeat=2):
            ex, ey = fx - m1, fy - m2
            scored.append((max(abs(i00 * ex + i01 * ey), abs(i10 * ex + i11 * ey)), m1, m2))
        floor = min(score for score, _, _ in scored)
        close = [self.to_eigen(dx - m1, dy - m2) for score, m1, m2 in scored if score <= floor + _FLOAT_SLACK]
        exact = [max(abs(u), abs(s)) for u, s in close]
        best = min(exact)
        return [pair for pair, norm in zip(close, exact) if norm == best]

    def eigen_coords(self, p: TorusPoint, near: TorusPoint) -> tuple[QuadNumber, QuadNumber]:
        if p == near:
            zero = self.q(0)
            return zero, zero
        reps = self._representatives(p, near)
        if len(reps) > 1:
            raise DegenerateInputError(f"ambiguous lattice representative for {p} relative to {near}")
        return reps[0]

    # dynamics

    def matrix_power(self, power: int) -> tuple[tuple[int, int], tuple[int, int]]:
        if power not in self._powers:
            base = np.array(self.matrix, dtype=object)
            if power < 0:
                (a, b), (c, d) = self.matrix
                base = np.array([[d, -b], [-c, a]], dtype=object) * self.det
            result = np.linalg.matrix_power(base, abs(power))
            self._powers[power] = tuple(tuple(int(v) for v in row) for row in result)
        return self._powers[power]

    def apply(self, p: TorusPoint, power: int) -> TorusPoint:
        if power == 0:
            return p
        (a, b), (c, d) = self.matrix_power(power)
        return point(p.x * a + p.y * b, p.x * c + p.y * d, self.D)

    def distance(self, p: TorusPoint, q: TorusPoint) -> QuadNumber:
        if p == q:
            return self.q(0)
        u, s = self._representatives(p, q)[0]
        return max(abs(u), abs(s))

    def splice(self, p: TorusPoint, q: TorusPoint) -> TorusPoint:
        u, _ = self.eigen_coords(p, q)
        return point(q.x + u * self.v_u[0], q.y + u * self.v_u[1], self.D)

    def orbit_signature(self, p: TorusPoint, horizon: int = 64) -> frozenset:
        images = {p}
        forward = backward = p
        for _ in range(horizon):
            forward = self.apply(forward, 1)
            backward = self.apply(backward, -1)
            images.update((forward, backward))
        return frozenset(images)

    # periodic and homoclinic points

    def rational_orbit(self, seed: Sequence) -> tuple[TorusPoint, ...]:
        start = self.make_point(Fraction(seed[0]), Fraction(seed[1]))
        if not (start.x.is_rational() and start.y.is_rational()):
            raise ModelError(f"orbit seed must be rational, got {seed!r}")
        orbit = [start]
        current = self.apply(start, 1)
        while current != start:
            orbit.append(current)
            current = self.apply(current, 1)
        return tuple(sorted(orbit))

    def check_disjoint(self, P: Iterable[TorusPoint], Q: Iterable[TorusPoint]) -> None:
        common = set(P) & set(Q)
        if common:
            raise ModelError(f"periodic orbits intersect at {min(common)}")

    def _solve(self, p: TorusPoint, q: TorusPoint, n: tuple[int, int]) -> TorusPoint:
        # t·v_s − s·v_u = n + q − p: t is the stable coordinate of the right side
        _, t = self.to_eigen(q.x - p.x + n[0], q.y - p.y + n[1])
        return point(p.x + t * self.v_s[0], p.y + t * self.v_s[1], self.D)

    def enumerate_homoclinic(
        self, P: Sequence[TorusPoint], Q: Sequence[TorusPoint], radius_cap: int
    ) -> list[TorusPoint]:
        """Homoclinic points of P and Q over lattice offsets with entries bounded by the cap."""
        self.check_disjoint(P, Q)
        best: dict[TorusPoint, int] = {}
        for p in P:
            for q in Q:
                for n in itertools.product(range(-radius_cap, radius_cap + 1), repeat=2):
                    x = self._solve(p, q, n)
                    complexity = max(abs(n[0]), abs(n[1]))
                    if complexity < best.get(x, radius_cap + 1):
                        best[x] = complexity
        points = sorted(best, key=lambda x: (best[x], x))
        logger.debug("enumerated %d torus homoclinic points at cap %d", len(points), radius_cap)
        return points

    def homoclinic_in_box(
        self,
        P: Sequence[TorusPoint],
        Q: Sequence[TorusPoint],
        u_bounds: tuple[QuadNumber, QuadNumber],
        s_bounds: tuple[QuadNumber, QuadNumber],
        complexity_cap: int,
    ) -> list[tuple[int, TorusPoint]]:
        """Homoclinic points with a plane lift inside the open eigen box, sorted with their complexity.

        A lift X with u(X) = u(p + m) and s(X) = s(q + m') sits on the stable
        line through p + m and on the unstable line through q + m'; its
        lattice offset, and so its complexity, is m' − m.
        """
        self.check_disjoint(P, Q)
        (au, as_), (bu, bs) = self.lattice_eigen(1, 0), self.lattice_eigen(0, 1)
        reach = self._lift_reach(complexity_cap, u_bounds, s_bounds)
        found: dict[TorusPoint, int] = {}
        for p in P:
            up, _ = self.to_eigen(p.x, p.y)
            window = ((-reach, reach), (-reach, reach))
            for m in self._solve_strip(up, au, bu, u_bounds, window):
                u_val = up + au * m[0] + bu * m[1]
                near = tuple((c - complexity_cap, c + complexity_cap) for c in m)
                for q in Q:
                    _, sq = self.to_eigen(q.x, q.y)
                    for m_prime in self._solve_strip(sq, as_, bs, s_bounds, near):
                        s_val = sq + as_ * m_prime[0] + bs * m_prime[1]
                        x = self.point_from_eigen(u_val, s_val)
                        complexity = max(abs(m_prime[0] - m[0]), abs(m_prime[1] - m[1]))
                        if complexity < found.get(x, complexity_cap + 1):
                            found[x] = complexity
        return sorted((c, x) for x, c in found.items())

    def _lift_reach(self, cap: int, u_bounds, s_bounds) -> int:
        """Bound on |m|∞ for stable-line lifts p + m of box points with offset ≤ cap."""
        extent = max(abs(float(v)) for v in (*u_bounds, *s_bounds))
        s_unit = sum(abs(float(self.lattice_eigen(*e)[1])) for e in ((1, 0), (0, 1)))
        v_max = max(abs(float(v)) for v in (*self.v_u, *self.v_s))
        t_max = (cap + 2) * s_unit + extent
        return int(math.ceil(2 * extent * v_max + 1 + t_max * v_max)) + 1

    @staticmethod
    def _solve_strip(base, coef1, coef2, bounds, window) -> Iterator[tuple[int, int]]:
        """Integer (m1, m2) inside the window with lo < base + coef1·m1 + coef2·m2 < hi."""
        lo, hi = bounds
        (lo1, hi1), (lo2, hi2) = window
        f2 = float(coef2)
        for m1 in range(lo1, hi1 + 1):
            shift = base + coef1 * m1
            first, last = sorted((float(lo - shift) / f2, float(hi - shift) / f2))
            for m2 in range(max(lo2, math.floor(first) - 1), min(hi2, math.ceil(last) + 1) + 1):
                value = shift + coef2 * m2
                if lo < value < hi:
                    yield (m1, m2)


def make_torus(matrix: Sequence[Sequence[int]]) -> TorusModel:
    return TorusModel(matrix)


__all__ = ["TorusModel", "TorusPoint", "make_torus", "point"]
