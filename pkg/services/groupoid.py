"""Stable and unstable groupoid elements acting on ℓ²(X^h(P, Q)).

A bisection V^s(v, w, h^s, η, N) is stored by its base points and constants;
its holonomy is evaluated exactly through the bracket, and the regular
representation, the automorphisms α_s, α_u and the unitary u are built as
lazy ``LinearMap`` columns on homoclinic points.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterable, Mapping, Optional, Sequence

from services.dynamics import (
    Exact,
    Point,
    SmaleSpaceModel,
    apply,
    bracket,
    dist,
    in_local_stable,
    in_local_unstable,
)
from services.operators import LinearMap

logger = logging.getLogger(__name__)

DEFAULT_BISECTION_SEARCH = 64


class Orientation(str, Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"


class ValueKind(str, Enum):
    CONSTANT = "constant"
    BUMP = "bump"
    TABLE = "table"


@dataclass(frozen=True)
class ValueFunction:
    """A function on the bisection, read in the source coordinate.

    bump(x) = scale·max(0, 1 - d(x, w)/radius) with w the domain center.
    """

    kind: ValueKind
    scale: float = 1.0
    radius: Optional[float] = None
    table: tuple = ()

    def __call__(self, model: SmaleSpaceModel, source: Point, center: Point) -> float:
        if self.kind is ValueKind.CONSTANT:
            return self.scale
        if self.kind is ValueKind.BUMP:
            return self.scale * max(0.0, 1.0 - dist(model, source, center) / self.radius)
        return dict(self.table).get(source, 0.0)

    @property
    def lipschitz(self) -> Optional[float]:
        if self.kind is ValueKind.CONSTANT:
            return 0.0
        if self.kind is ValueKind.BUMP:
            return abs(self.scale) / self.radius
        return None

    def as_dict(self) -> dict:
        out = {"kind": self.kind.value, "scale": self.scale, "lipschitz": self.lipschitz}
        if self.radius is not None:
            out["radius"] = self.radius
        if self.table:
            out["table_size"] = len(self.table)
        return out


def constant_value(scale: float = 1.0) -> ValueFunction:
    return ValueFunction(ValueKind.CONSTANT, scale=scale)


def bump_value(radius: Optional[float] = None, scale: float = 1.0) -> ValueFunction:
    """Without a radius the bisection helpers use the domain radius η."""
    if radius is not None and radius <= 0:
        raise ValueError(f"bump radius must be positive, got {radius}")
    return ValueFunction(ValueKind.BUMP, scale=scale, radius=radius)


def table_value(values: Mapping[Point, float]) -> ValueFunction:
    return ValueFunction(ValueKind.TABLE, table=tuple(sorted(values.items())))


@dataclass(frozen=True)
class Bisection:
    orientation: Orientation
    v: Point
    w: Point
    N: int
    eta: Exact
    value: ValueFunction = field(default_factory=constant_value)
    shift: int = 0

    @property
    def reported_N(self) -> int:
        return self.N - self.shift

    def describe(self) -> dict:
        return {
            "orientation": self.orientation.value,
            "v": str(self.v),
            "w": str(self.w),
            "N": self.reported_N,
            "eta": float(self.eta),
            "shift": self.shift,
            "value": self.value.as_dict(),
        }


def _raw_holonomy(model: SmaleSpaceModel, b: Bisection, x: Point, base: Point) -> Optional[Point]:
    """φ^-N [φ^N x, φ^N base] (stable) or φ^N [φ^-N base, φ^-N x] (unstable)."""
    if b.orientation is Orientation.STABLE:
        y = bracket(model, apply(model, x, b.N), apply(model, base, b.N))
        return None if y is None else apply(model, y, -b.N)
    y = bracket(model, apply(model, base, -b.N), apply(model, x, -b.N))
    return None if y is None else apply(model, y, b.N)


def _in_domain(model: SmaleSpaceModel, b: Bisection, x: Point) -> bool:
    if b.orientation is Orientation.STABLE:
        return in_local_unstable(model, b.w, x, b.eta)
    return in_local_stable(model, b.w, x, b.eta)


def holonomy(model: SmaleSpaceModel, b: Bisection, x: Point) -> Optional[Point]:
    """h(x) for x in the (shifted) domain of b, None elsewhere."""
    x0 = apply(model, x, -b.shift)
    if not _in_domain(model, b, x0):
        return None
    y = _raw_holonomy(model, b, x0, b.v)
    return None if y is None else apply(model, y, b.shift)


def inverse_holonomy(model: SmaleSpaceModel, b: Bisection, y: Point) -> Optional[Point]:
    """The x with h(x) = y, if any."""
    y0 = apply(model, y, -b.shift)
    x0 = _raw_holonomy(model, b, y0, b.w)
    if x0 is None:
        return None
    x = apply(model, x0, b.shift)
    return x if holonomy(model, b, x) == y else None


def value_at(model: SmaleSpaceModel, b: Bisection, source: Point) -> float:
    return b.value(model, apply(model, source, -b.shift), b.w)


def rep(model: SmaleSpaceModel, b: Bisection) -> LinearMap:
    """Regular representation: δ_x ↦ value(h(x), x)·δ_{h(x)}."""

    def column(x: Point) -> dict:
        y = holonomy(model, b, x)
        return {} if y is None else {y: value_at(model, b, x)}

    def adjoint_column(y: Point) -> dict:
        x = inverse_holonomy(model, b, y)
        return {} if x is None else {x: value_at(model, b, x)}

    return LinearMap(column, adjoint_column, f"rho({b.orientation.value[0]},{b.shift})")


def alpha(b: Bisection, n: int) -> Bisection:
    """α^n: transport the bisection by φ^n, so rep(alpha(b, n)) = u^n rep(b) u^-n."""
    return b if n == 0 else replace(b, shift=b.shift + n)


def unitary_u(model: SmaleSpaceModel, power: int = 1) -> LinearMap:
    def forward(x: Point) -> dict:
        return {apply(model, x, power): 1.0}

    def backward(x: Point) -> dict:
        return {apply(model, x, -power): 1.0}

    return LinearMap(forward, backward, f"u^{power}")


def product_block(model: SmaleSpaceModel, a: Bisection, b: Bisection, n: int, i: int) -> LinearMap:
    """α_u^-n(b) · α_s^n(a) · u^i for a stable and b unstable."""
    if a.orientation is not Orientation.STABLE or b.orientation is not Orientation.UNSTABLE:
        raise ValueError("product_block takes a stable bisection a and an unstable bisection b")
    return rep(model, alpha(b, -n)) @ rep(model, alpha(a, n)) @ unitary_u(model, i)


def commutator(model: SmaleSpaceModel, a: Bisection, b: Bisection, n: int) -> LinearMap:
    """α_s^n(a)·b - b·α_s^n(a)."""
    left = rep(model, alpha(a, n))
    right = rep(model, b)
    return left @ right - right @ left


def _bisection(
    model: SmaleSpaceModel,
    v: Point,
    w: Point,
    orientation: Orientation,
    value: Optional[ValueFunction],
    search: int,
) -> Bisection:
    backend = model.backend
    eps = backend.eps_x_exact
    sign = 1 if orientation is Orientation.STABLE else -1
    local = in_local_stable if orientation is Orientation.STABLE else in_local_unstable
    for N in range(search + 1):
        vN, wN = apply(model, v, sign * N), apply(model, w, sign * N)
        close = vN == wN or backend.distance(vN, wN) <= eps / 2
        if close and (vN == wN or local(model, wN, vN, eps)):
            eta = eps / (2 * backend.lam_exact**N)
            if value is None:
                value = constant_value()
            elif value.kind is ValueKind.BUMP and value.radius is None:
                value = replace(value, radius=float(eta))
            return Bisection(orientation, v, w, N, eta, value)
    raise ValueError(f"{v} and {w} are not {orientation.value}ly equivalent within {search} steps")


def stable_bisection(
    model: SmaleSpaceModel,
    v: Point,
    w: Point,
    value: Optional[ValueFunction] = None,
    search: int = DEFAULT_BISECTION_SEARCH,
) -> Bisection:
    """V^s(v, w, h^s, η, N) with N minimal such that φ^N v, φ^N w are ε_X/2-close and locally stable."""
    return _bisection(model, v, w, Orientation.STABLE, value, search)


def unstable_bisection(
    model: SmaleSpaceModel,
    v: Point,
    w: Point,
    value: Optional[ValueFunction] = None,
    search: int = DEFAULT_BISECTION_SEARCH,
) -> Bisection:
    return _bisection(model, v, w, Orientation.UNSTABLE, value, search)


def bisection_pairs(
    model: SmaleSpaceModel,
    points: Sequence[Point],
    orientation: Orientation,
    count: int,
    value: Optional[ValueFunction] = None,
    search: int = 16,
) -> list[Bisection]:
    """The first `count` bisections over ordered pairs v < w of the points."""
    make = stable_bisection if orientation is Orientation.STABLE else unstable_bisection
    found: list[Bisection] = []
    ordered = sorted(points)
    for i, v in enumerate(ordered):
        for w in ordered[i + 1:]:
            try:
                found.append(make(model, v, w, value, search))
            except ValueError:
                continue
            if len(found) == count:
                return found
    logger.warning("only %d %s bisections among %d points", len(found), orientation.value, len(ordered))
    return found


class BasisWindow:
    """An ordered finite set of basis points with its index map."""

    def __init__(self, points: Iterable[Point], truncated: Sequence[str] = ()):
        self.points: tuple = tuple(sorted(set(points)))
        self.index: dict = {p: i for i, p in enumerate(self.points)}
        self.truncated: tuple[str, ...] = tuple(truncated)

    def __contains__(self, key: object) -> bool:
        return key in self.index

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def index_of(self, p: Point) -> int:
        return self.index[p]

    def describe(self) -> dict:
        return {"size": len(self.points), "truncated": list(self.truncated)}


def build_window(
    model: SmaleSpaceModel,
    seed: Iterable[Point],
    *,
    cap: int,
    depth: int = 0,
    bisections: Sequence[Bisection] = (),
    sample_points: Sequence[Point] = (),
) -> BasisWindow:
    """Close the seed under φ^±1 to the depth, then under the bisections and brackets with sample points.

    Each step processes its input in sorted order, so the result does not
    depend on how the seed was ordered.
    """
    points: set = set(seed)
    if not points:
        raise ValueError("basis window needs a non-empty seed")
    truncated: list[str] = []

    def admit(candidates: Iterable[Point], step: str) -> list:
        added = []
        for y in sorted({c for c in candidates if c is not None and c not in points}):
            if len(points) >= cap:
                truncated.append(step)
                logger.info("window truncated at %d points during %s", cap, step)
                break
            points.add(y)
            added.append(y)
        return added

    frontier = sorted(points)
    for level in range(depth):
        if truncated:
            break
        images = [apply(model, x, p) for x in frontier for p in (1, -1)]
        frontier = admit(images, f"orbit depth {level + 1}")
    if not truncated and bisections:
        base = sorted(points)
        images = []
        for b in bisections:
            for x in base:
                images.append(holonomy(model, b, x))
                images.append(inverse_holonomy(model, b, x))
        admit(images, "holonomy")
    if not truncated and sample_points:
        base = sorted(points)
        images = []
        for g in sample_points:
            for x in base:
                images.append(bracket(model, x, g))
                images.append(bracket(model, g, x))
        admit(images, "brackets")
    window = BasisWindow(points, truncated)
    logger.info("basis window: %d points (depth %d, %d bisections)", len(window), depth, len(bisections))
    return window


class DiagonalBlockFamily:
    """A lazily built family n ↦ block of a diagonal operator ⊕_n T_n."""

    def __init__(self, block: Callable[[int], LinearMap], name: str = "block"):
        self._block = block
        self._cache: dict[int, LinearMap] = {}
        self.name = name

    def __getitem__(self, n: int) -> LinearMap:
        if n not in self._cache:
            self._cache[n] = self._block(n)
        return self._cache[n]

    def indices(self) -> list[int]:
        return sorted(self._cache)


__all__ = [
    "Orientation",
    "ValueKind",
    "ValueFunction",
    "constant_value",
    "bump_value",
    "table_value",
    "Bisection",
    "holonomy",
    "inverse_holonomy",
    "value_at",
    "rep",
    "alpha",
    "unitary_u",
    "product_block",
    "commutator",
    "stable_bisection",
    "unstable_bisection",
    "bisection_pairs",
    "BasisWindow",
    "build_window",
    "DiagonalBlockFamily",
]
