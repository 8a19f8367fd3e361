"""Exact linear algebra over the rationals on sparse vectors.

Vectors are dicts mapping column index to a nonzero Fraction.  The
central tool is an online row reducer that maintains a row space in
echelon form; rank, span membership, nullspace and linear solves are
all built on it.  Everything is exact.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

SparseVec = Dict[int, Fraction]


def vec_add_scaled(target: SparseVec, source: SparseVec, scalar: Fraction) -> None:
    """target += scalar * source, in place, dropping zeros."""
    if scalar == 0:
        return
    for col, val in source.items():
        new = target.get(col, Fraction(0)) + scalar * val
        if new == 0:
            target.pop(col, None)
        else:
            target[col] = new


class RowReducer:
    """Incremental echelon form keyed by pivot column.

    Rows are normalized so the pivot entry is 1; each stored row has the
    smallest possible pivot column among its support.
    """

    def __init__(self):
        self.pivots: Dict[int, SparseVec] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def residual(self, vec: SparseVec) -> SparseVec:
        """Reduce vec against the stored rows; returns what is left."""
        out = dict(vec)
        while out:
            pivot_col = min(out)
            row = self.pivots.get(pivot_col)
            if row is None:
                return out
            vec_add_scaled(out, row, -out[pivot_col])
        return out

    def add(self, vec: SparseVec) -> bool:
        """Insert a vector; True iff it enlarged the row space."""
        res = self.residual(vec)
        if not res:
            return False
        pivot_col = min(res)
        inv = Fraction(1) / res[pivot_col]
        self.pivots[pivot_col] = {c: v * inv for c, v in res.items()}
        return True

    def contains(self, vec: SparseVec) -> bool:
        return not self.residual(vec)


def rank_of(vectors: Sequence[SparseVec]) -> int:
    reducer = RowReducer()
    for vec in vectors:
        reducer.add(vec)
    return reducer.rank


def _reduced_pivot_rows(rows: Sequence[SparseVec]) -> Dict[int, SparseVec]:
    """Gauss-Jordan: fully reduced rows keyed by pivot column."""
    reducer = RowReducer()
    for row in rows:
        reducer.add(row)
    pivots = reducer.pivots
    # Back-substitute so every pivot column appears in exactly one row.
    for col in sorted(pivots, reverse=True):
        row = pivots[col]
        for other_col, other_row in pivots.items():
            if other_col < col and col in other_row:
                vec_add_scaled(other_row, row, -other_row[col])
    return pivots


def nullspace(rows: Sequence[SparseVec], ncols: int) -> List[SparseVec]:
    """Basis of the solution space of (rows) . x = 0 in dimension ncols.

    One basis vector per free column, with that free coordinate set to 1;
    this makes the basis deterministic.
    """
    pivots = _reduced_pivot_rows(rows)
    free_cols = [c for c in range(ncols) if c not in pivots]
    basis: List[SparseVec] = []
    for free in free_cols:
        vec: SparseVec = {free: Fraction(1)}
        for pivot_col, row in pivots.items():
            coeff = row.get(free)
            if coeff is not None:
                vec[pivot_col] = -coeff
        basis.append(vec)
    return basis


def solve(rows: Sequence[SparseVec], rhs: Sequence[Fraction], ncols: int) -> Optional[SparseVec]:
    """One exact solution x of (rows) . x = rhs, or None if inconsistent.

    Free coordinates are set to zero.
    """
    augmented: List[SparseVec] = []
    for row, value in zip(rows, rhs):
        vec = dict(row)
        if value != 0:
            vec[ncols] = Fraction(value)
        augmented.append(vec)
    pivots = _reduced_pivot_rows(augmented)
    if ncols in pivots:
        return None
    solution: SparseVec = {}
    for pivot_col, row in pivots.items():
        value = row.get(ncols)
        if value is not None:
            # Reduced row encodes x_pivot + (free terms) = value.
            solution[pivot_col] = value
    return solution


def rank_dense(matrix: Sequence[Sequence[Fraction]]) -> int:
    vectors = []
    for row in matrix:
        vec = {j: Fraction(v) for j, v in enumerate(row) if v != 0}
        vectors.append(vec)
    return rank_of(vectors)


def det_dense(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant of a square rational matrix by elimination."""
    size = len(matrix)
    rows = [[Fraction(v) for v in row] for row in matrix]
    if any(len(row) != size for row in rows):
        raise ValueError("determinant needs a square matrix")
    det = Fraction(1)
    for col in range(size):
        pivot_row = next((r for r in range(col, size) if rows[r][col] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            rows[col], rows[pivot_row] = rows[pivot_row], rows[col]
            det = -det
        pivot = rows[col][col]
        det *= pivot
        for r in range(col + 1, size):
            if rows[r][col] != 0:
                factor = rows[r][col] / pivot
                for c in range(col, size):
                    rows[r][c] -= factor * rows[col][c]
    return det
