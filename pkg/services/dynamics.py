"""The Smale-space contract shared by every backend.

A backend supplies the homeomorphism, an exact metric, the bracket and the
constants (λ, ε_X, ε'_X, h). ``SmaleSpaceModel`` wraps a backend with the
float views of those constants, and the module-level helpers express the
generic local stable/unstable predicates and axiom checks on top of it.
"""
from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Hashable, Iterable, Optional, Union

from services.quadratic import QuadNumber

logger = logging.getLogger(__name__)

Exact = Union[Fraction, QuadNumber]
Point = Hashable


def as_exact(value: Union[int, float, Fraction, QuadNumber]) -> Exact:
    """Turn a float radius into the exact rational it denotes."""
    if isinstance(value, (Fraction, QuadNumber)):
        return value
    return Fraction(value)


class SmaleBackend(ABC):
    """Concrete hyperbolic system: points are immutable, hashable and totally ordered."""

    kind: str = "abstract"

    @property
    @abstractmethod
    def lam_exact(self) -> Exact: ...

    @property
    @abstractmethod
    def eps_x_exact(self) -> Exact: ...

    @property
    def eps_x_prime_exact(self) -> Exact:
        return self.eps_x_exact / 4

    @property
    @abstractmethod
    def entropy(self) -> float: ...

    @abstractmethod
    def apply(self, p: Point, power: int) -> Point: ...

    @abstractmethod
    def distance(self, p: Point, q: Point) -> Exact:
        """Exact distance; comparisons against radii never go through floats."""

    @abstractmethod
    def splice(self, p: Point, q: Point) -> Point:
        """Bracket without the domain check; callers guarantee d(p, q) ≤ ε_X."""

    @abstractmethod
    def orbit_signature(self, p: Point, horizon: int) -> frozenset:
        """Keys that two points share iff they lie on a common orbit (within horizon)."""

    def bracket(self, p: Point, q: Point) -> Optional[Point]:
        if self.distance(p, q) > self.eps_x_exact:
            return None
        return self.splice(p, q)

    def describe(self) -> dict[str, Any]:
        return {
            "backend": self.kind,
            "lambda": float(self.lam_exact),
            "eps_x": float(self.eps_x_exact),
            "eps_x_prime": float(self.eps_x_prime_exact),
            "entropy": self.entropy,
        }


@dataclass(frozen=True)
class SmaleSpaceModel:
    lam: float
    eps_x: float
    eps_x_prime: float
    entropy: float
    backend: SmaleBackend = field(repr=False, compare=False)

    @classmethod
    def from_backend(cls, backend: SmaleBackend) -> SmaleSpaceModel:
        model = cls(
            lam=float(backend.lam_exact),
            eps_x=float(backend.eps_x_exact),
            eps_x_prime=float(backend.eps_x_prime_exact),
            entropy=backend.entropy,
            backend=backend,
        )
        logger.info(
            "built %s model: lambda=%.6g eps_x=%.6g entropy=%.6g",
            backend.kind, model.lam, model.eps_x, model.entropy,
        )
        return model

    def describe(self) -> dict[str, Any]:
        return self.backend.describe()


def apply(model: SmaleSpaceModel, p: Point, power: int) -> Point:
    if power == 0:
        return p
    return model.backend.apply(p, power)


def dist(model: SmaleSpaceModel, p: Point, q: Point) -> float:
    if p == q:
        return 0.0
    return float(model.backend.distance(p, q))


def bracket(model: SmaleSpaceModel, p: Point, q: Point) -> Optional[Point]:
    """[p, q], or None when d(p, q) > ε_X."""
    if p == q:
        return p
    return model.backend.bracket(p, q)


def within(model: SmaleSpaceModel, p: Point, q: Point, radius, *, strict: bool = True) -> bool:
    d = model.backend.distance(p, q) if p != q else Fraction(0)
    r = as_exact(radius)
    return d < r if strict else d <= r


def in_local_stable(model: SmaleSpaceModel, base: Point, p: Point, eps) -> bool:
    if not within(model, base, p, eps):
        return False
    return bracket(model, p, base) == base


def in_local_unstable(model: SmaleSpaceModel, base: Point, p: Point, eps) -> bool:
    if not within(model, base, p, eps):
        return False
    return bracket(model, base, p) == base


def bracket_axiom_violations(model: SmaleSpaceModel, x: Point, y: Point, z: Point) -> list[str]:
    """Names of the bracket axioms that fail on (x, y, z); axioms with undefined sides are skipped."""
    failed: list[str] = []
    if bracket(model, x, x) != x:
        failed.append("idempotent")
    yz = bracket(model, y, z)
    xz = bracket(model, x, z)
    if yz is not None and xz is not None:
        lhs = bracket(model, x, yz)
        if lhs is not None and lhs != xz:
            failed.append("left-absorb")
    xy = bracket(model, x, y)
    if xy is not None and xz is not None:
        lhs = bracket(model, xy, z)
        if lhs is not None and lhs != xz:
            failed.append("right-absorb")
    if xy is not None:
        image = bracket(model, apply(model, x, 1), apply(model, y, 1))
        if image is not None and image != apply(model, xy, 1):
            failed.append("equivariant")
    return failed


def contraction_violations(model: SmaleSpaceModel, base: Point, y: Point, z: Point) -> list[str]:
    """φ contracts common local stable sets by λ, φ^-1 common local unstable sets."""
    failed: list[str] = []
    backend = model.backend
    lam = backend.lam_exact
    eps = backend.eps_x_exact
    if in_local_stable(model, base, y, eps) and in_local_stable(model, base, z, eps) and y != z:
        if backend.distance(apply(model, y, 1), apply(model, z, 1)) * lam > backend.distance(y, z):
            failed.append("stable-contraction")
    if in_local_unstable(model, base, y, eps) and in_local_unstable(model, base, z, eps) and y != z:
        if backend.distance(apply(model, y, -1), apply(model, z, -1)) * lam > backend.distance(y, z):
            failed.append("unstable-contraction")
    return failed


def self_similarity_violations(model: SmaleSpaceModel, p: Point, q: Point) -> list[str]:
    backend = model.backend
    if p == q or backend.distance(p, q) > backend.eps_x_exact:
        return []
    failed: list[str] = []
    d = backend.distance(p, q)
    if backend.distance(apply(model, p, 1), apply(model, q, 1)) > backend.lam_exact * d:
        failed.append("lipschitz-forward")
    if backend.distance(apply(model, p, -1), apply(model, q, -1)) > backend.lam_exact * d:
        failed.append("lipschitz-backward")
    eps_prime = backend.eps_x_prime_exact
    if d <= eps_prime:
        pq = backend.splice(p, q)
        half = backend.eps_x_exact / 2
        if not (backend.distance(p, pq) < half and backend.distance(q, pq) < half):
            failed.append("bracket-locality")
    return failed


def orbit(model: SmaleSpaceModel, p: Point, length: int) -> Iterable[Point]:
    current = p
    for _ in range(length):
        yield current
        current = apply(model, current, 1)


__all__ = [
    "SmaleBackend",
    "SmaleSpaceModel",
    "Exact",
    "Point",
    "as_exact",
    "apply",
    "dist",
    "bracket",
    "within",
    "in_local_stable",
    "in_local_unstable",
    "bracket_axiom_violations",
    "contraction_violations",
    "self_similarity_violations",
    "orbit",
]
