"""Linear maps on ℓ²(X^h) and ℓ²(X^h) ⊗ ℓ²(X^h).

A ``LinearMap`` is a pair of exact column functions (the map and its
adjoint) on basis keys: homoclinic points for ℋ, point pairs for ℋ⊗ℋ.
Columns are never truncated, so sums, products and adjoints stay exact at
every key. ``SparseOperator`` is a finite section: the columns at a domain
window, stored as a scipy sparse matrix over the reached codomain keys.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Container, Hashable, Iterable, Mapping, Optional, Sequence

import numpy as np
from scipy.sparse import csr_array

logger = logging.getLogger(__name__)

Key = Hashable
Column = dict
ColumnFn = Callable[[Key], Mapping[Key, float]]


def _accumulate(out: dict, key: Key, value: float) -> None:
    total = out.get(key, 0.0) + value
    if total == 0.0:
        out.pop(key, None)
    else:
        out[key] = total


class LinearMap:
    """A bounded operator known through its columns and those of its adjoint."""

    def __init__(self, column: ColumnFn, adjoint_column: ColumnFn, name: str = "op"):
        self._column = column
        self._adjoint_column = adjoint_column
        self.name = name
        self._cache: dict[Key, Column] = {}
        self._adjoint: Optional[LinearMap] = None

    def __repr__(self) -> str:
        return f"LinearMap({self.name})"

    def column(self, key: Key) -> Column:
        if key not in self._cache:
            self._cache[key] = {k: v for k, v in self._column(key).items() if v != 0.0}
        return self._cache[key]

    def apply(self, vector: Mapping[Key, float]) -> Column:
        out: Column = {}
        for key, coef in vector.items():
            for target, value in self.column(key).items():
                _accumulate(out, target, coef * value)
        return out

    @property
    def adjoint(self) -> LinearMap:
        if self._adjoint is None:
            self._adjoint = LinearMap(self._adjoint_column, self._column, f"{self.name}*")
            self._adjoint._adjoint = self
        return self._adjoint

    def __matmul__(self, other: LinearMap) -> LinearMap:
        return LinearMap(
            lambda k: self.apply(other.column(k)),
            lambda k: other.adjoint.apply(self.adjoint.column(k)),
            f"({self.name} {other.name})",
        )

    def __add__(self, other: LinearMap) -> LinearMap:
        return combine([(1.0, self), (1.0, other)], f"({self.name} + {other.name})")

    def __sub__(self, other: LinearMap) -> LinearMap:
        return combine([(1.0, self), (-1.0, other)], f"({self.name} - {other.name})")

    def __neg__(self) -> LinearMap:
        return self.scaled(-1.0)

    def scaled(self, factor: float) -> LinearMap:
        return combine([(factor, self)], f"{factor:g}·{self.name}")

    def __mul__(self, factor: float) -> LinearMap:
        return self.scaled(factor)

    __rmul__ = __mul__

    def section(self, domain: Sequence[Key], codomain: Optional[Container] = None) -> SparseOperator:
        return section(self, domain, codomain)


def identity(name: str = "I") -> LinearMap:
    def column(key: Key) -> Column:
        return {key: 1.0}

    return LinearMap(column, column, name)


def zero(name: str = "0") -> LinearMap:
    def column(key: Key) -> Column:
        return {}

    return LinearMap(column, column, name)


def combine(terms: Iterable[tuple[float, LinearMap]], name: str = "sum") -> LinearMap:
    """Σ c_i A_i; the adjoint uses the same real coefficients."""
    terms = [(float(c), op) for c, op in terms if c != 0]

    def column(key: Key) -> Column:
        out: Column = {}
        for coef, op in terms:
            for target, value in op.column(key).items():
                _accumulate(out, target, coef * value)
        return out

    def adjoint_column(key: Key) -> Column:
        out: Column = {}
        for coef, op in terms:
            for target, value in op.adjoint.column(key).items():
                _accumulate(out, target, coef * value)
        return out

    return LinearMap(column, adjoint_column, name)


def tensor(left: LinearMap, right: LinearMap) -> LinearMap:
    """A ⊗ B acting on pair keys (x, z)."""

    def product(a: LinearMap, b: LinearMap) -> ColumnFn:
        def column(key: Key) -> Column:
            x, z = key
            return {(p, q): u * v for p, u in a.column(x).items() for q, v in b.column(z).items()}

        return column

    return LinearMap(
        product(left, right),
        product(left.adjoint, right.adjoint),
        f"({left.name} ⊗ {right.name})",
    )


class TensorWindow:
    """Pair keys whose coordinates both lie in a base window."""

    def __init__(self, base: Container):
        self.base = base

    def __contains__(self, key: object) -> bool:
        return isinstance(key, tuple) and len(key) == 2 and key[0] in self.base and key[1] in self.base


@dataclass(frozen=True)
class SparseOperator:
    domain: tuple
    codomain: tuple
    matrix: csr_array
    window_exact: bool

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def nnz(self) -> int:
        return int(self.matrix.count_nonzero())

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def max_abs(self) -> float:
        return float(abs(self.matrix).max()) if self.matrix.nnz else 0.0

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.max_abs() <= tol

    @property
    def T(self) -> SparseOperator:
        return SparseOperator(self.codomain, self.domain, csr_array(self.matrix.T), self.window_exact)

    def entry(self, row: Key, col: Key) -> float:
        try:
            i = self.codomain.index(row)
            j = self.domain.index(col)
        except ValueError:
            return 0.0
        return float(self.matrix[i, j])


def _build(domain: tuple, columns: list[Column], codomain: Optional[Sequence[Key]]) -> tuple[tuple, csr_array]:
    if codomain is None:
        codomain = tuple(sorted({k for col in columns for k in col}))
    index = {k: i for i, k in enumerate(codomain)}
    rows: list[int] = []
    cols: list[int] = []
    data: list[float] = []
    for j, col in enumerate(columns):
        for key, value in col.items():
            i = index.get(key)
            if i is not None:
                rows.append(i)
                cols.append(j)
                data.append(value)
    matrix = csr_array((data, (rows, cols)), shape=(len(codomain), len(domain)), dtype=float)
    matrix.sum_duplicates()
    return tuple(codomain), matrix


def section(op: LinearMap, domain: Sequence[Key], codomain: Optional[Container] = None) -> SparseOperator:
    """Columns of op at the domain keys.

    With no codomain the rows are exactly the reached keys and the section
    is exact. With a codomain window, rows are restricted to it and
    window_exact records whether any nonzero entry fell outside.
    """
    domain = tuple(domain)
    columns = [op.column(key) for key in domain]
    reached = sorted({k for col in columns for k in col})
    if codomain is None:
        rows, matrix = _build(domain, columns, reached)
        return SparseOperator(domain, rows, matrix, True)
    inside = [k for k in reached if k in codomain]
    exact = len(inside) == len(reached)
    if not exact:
        logger.debug("%s: %d of %d reached keys outside the window", op.name, len(reached) - len(inside), len(reached))
    if isinstance(codomain, (set, frozenset)):
        window_rows = sorted(codomain)
    elif hasattr(codomain, "__iter__"):
        window_rows = list(codomain)
    else:
        window_rows = inside
    rows, matrix = _build(domain, columns, window_rows)
    return SparseOperator(domain, rows, matrix, exact)


def sections(ops: Sequence[LinearMap], domain: Sequence[Key]) -> list[SparseOperator]:
    """Exact sections of several maps on one domain, sharing a row index."""
    domain = tuple(domain)
    all_columns = [[op.column(key) for key in domain] for op in ops]
    rows = tuple(sorted({k for columns in all_columns for col in columns for k in col}))
    out = []
    for columns in all_columns:
        codomain, matrix = _build(domain, columns, rows)
        out.append(SparseOperator(domain, codomain, matrix, True))
    return out


def compression(left: LinearMap, right: LinearMap, domain: Sequence[Key]) -> np.ndarray:
    """The D × D block of left* · right, computed as a Gram matrix of exact columns."""
    a, b = sections([left, right], domain)
    return (a.matrix.T @ b.matrix).toarray()


def restriction(op: LinearMap, domain: Sequence[Key]) -> np.ndarray:
    """The D × D block of an operator on ℋ."""
    return section(op, domain, list(domain)).dense()


__all__ = [
    "LinearMap",
    "SparseOperator",
    "TensorWindow",
    "identity",
    "zero",
    "combine",
    "tensor",
    "section",
    "sections",
    "compression",
    "restriction",
]
