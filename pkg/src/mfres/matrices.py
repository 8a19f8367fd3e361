"""Matrices with polynomial entries.

Thin immutable wrapper used for matrix factorisations, chain maps and
cofactor determinants.  Zero-row or zero-column shapes are legal (they
show up as components of zero complexes).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence, Tuple

from .errors import AmbientMismatch, ShapeMismatch
from .poly import Polynomial, PolyRing


@dataclass(frozen=True)
class PolyMatrix:
    ring: PolyRing
    nrows: int
    ncols: int
    entries: Tuple[Tuple[Polynomial, ...], ...]

    def __post_init__(self):
        if len(self.entries) != self.nrows or any(len(r) != self.ncols for r in self.entries):
            raise ShapeMismatch("entry grid does not match declared shape")
        for row in self.entries:
            for entry in row:
                if entry.ring != self.ring:
                    raise AmbientMismatch("matrix entry over the wrong ring")

    def __getitem__(self, index: Tuple[int, int]) -> Polynomial:
        i, j = index
        return self.entries[i][j]

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.entries for e in row)

    def map(self, fn: Callable[[Polynomial], Polynomial]) -> "PolyMatrix":
        return PolyMatrix(
            self.ring,
            self.nrows,
            self.ncols,
            tuple(tuple(fn(e) for e in row) for row in self.entries),
        )

    def diff(self, index: int) -> "PolyMatrix":
        return self.map(lambda e: e.diff(index))

    def scale(self, scalar) -> "PolyMatrix":
        if isinstance(scalar, Polynomial):
            return self.map(lambda e: e * scalar)
        return self.map(lambda e: e.scale(Fraction(scalar)))

    def __neg__(self) -> "PolyMatrix":
        return self.map(lambda e: -e)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._same_shape(other)
        return PolyMatrix(
            self.ring,
            self.nrows,
            self.ncols,
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.entries, other.entries)
            ),
        )

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + (-other)

    def __mul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        if self.ring != other.ring:
            raise AmbientMismatch("matrix product over different rings")
        if self.ncols != other.nrows:
            raise ShapeMismatch(
                f"cannot multiply {self.nrows}x{self.ncols} by {other.nrows}x{other.ncols}"
            )
        zero = self.ring.zero()
        rows = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = zero
                for k in range(self.ncols):
                    a = self.entries[i][k]
                    b = other.entries[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            rows.append(tuple(row))
        return PolyMatrix(self.ring, self.nrows, other.ncols, tuple(rows))

    def trace(self) -> Polynomial:
        if self.nrows != self.ncols:
            raise ShapeMismatch("trace of a non-square matrix")
        acc = self.ring.zero()
        for i in range(self.nrows):
            acc = acc + self.entries[i][i]
        return acc

    def _same_shape(self, other: "PolyMatrix") -> None:
        if self.ring != other.ring:
            raise AmbientMismatch("matrices over different rings")
        if (self.nrows, self.ncols) != (other.nrows, other.ncols):
            raise ShapeMismatch(
                f"shape mismatch {self.nrows}x{self.ncols} vs {other.nrows}x{other.ncols}"
            )

    def __str__(self):
        return "[" + "; ".join(", ".join(str(e) for e in row) for row in self.entries) + "]"


def matrix(ring: PolyRing, rows: Sequence[Sequence[Polynomial]], ncols: int | None = None) -> PolyMatrix:
    """Build a PolyMatrix from nested sequences (ncols needed when empty)."""
    grid = tuple(tuple(row) for row in rows)
    nrows = len(grid)
    if nrows == 0:
        if ncols is None:
            ncols = 0
        return PolyMatrix(ring, 0, ncols, ())
    width = len(grid[0])
    return PolyMatrix(ring, nrows, width, grid)


def zeros(ring: PolyRing, nrows: int, ncols: int) -> PolyMatrix:
    zero = ring.zero()
    return PolyMatrix(ring, nrows, ncols, tuple(tuple(zero for _ in range(ncols)) for _ in range(nrows)))


def identity(ring: PolyRing, size: int, scalar: Polynomial | int | Fraction = 1) -> PolyMatrix:
    diag = scalar if isinstance(scalar, Polynomial) else ring.const(scalar)
    zero = ring.zero()
    return PolyMatrix(
        ring,
        size,
        size,
        tuple(tuple(diag if i == j else zero for j in range(size)) for i in range(size)),
    )


def determinant(mat: PolyMatrix) -> Polynomial:
    """Exact determinant by Laplace expansion with column-subset memoization."""
    if mat.nrows != mat.ncols:
        raise ShapeMismatch("determinant of a non-square matrix")
    size = mat.nrows
    if size == 0:
        return mat.ring.one()
    memo: dict = {}

    def minor(row: int, cols: frozenset) -> Polynomial:
        if row == size:
            return mat.ring.one()
        key = cols
        cached = memo.get(key)
        if cached is not None:
            return cached
        acc = mat.ring.zero()
        for sign_index, col in enumerate(sorted(cols)):
            entry = mat.entries[row][col]
            if entry.is_zero():
                continue
            sub = minor(row + 1, cols - {col})
            piece = entry * sub
            acc = acc + piece if sign_index % 2 == 0 else acc - piece
        memo[key] = acc
        return acc

    return minor(0, frozenset(range(size)))
