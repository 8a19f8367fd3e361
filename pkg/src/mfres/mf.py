"""Matrix factorisations of a potential and their graded morphisms.

A matrix factorisation of W is a pair of matrices d0: X^0 -> X^1 and
d1: X^1 -> X^0 with d1 d0 = W I and d0 d1 = W I, both exact.  Morphisms
are Z/2-graded: an even morphism has blocks X^0 -> Y^0 and X^1 -> Y^1,
an odd one X^0 -> Y^1 and X^1 -> Y^0.  The differential on morphisms is

    D(f) = d_Y f - (-1)^{|f|} f d_X,

so closed odd morphisms anticommute with the differentials.  Stable
morphism spaces (closed morphisms modulo null-homotopic ones) are
finite dimensional because they are killed by the partial derivatives
of W; they are computed by exact linear algebra over the rationals with
a degree truncation that must stabilize twice before it is trusted.

The shift swaps the gradings and negates both blocks, so the square of
the shift is the identity on the nose.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .errors import (
    AmbientMismatch,
    NoStabilization,
    NotZeroDimensional,
    SearchExhausted,
    ShapeMismatch,
)
from .ideals import cached_groebner, quotient_basis
from .matrices import PolyMatrix, identity, matrix, zeros
from .poly import Monomial, Polynomial, PolyRing, grevlex_key

EVEN = 0
ODD = 1


@dataclass(frozen=True)
class MatrixFactorisation:
    """Z/2-graded free module with an odd differential squaring to W."""

    ring: PolyRing
    potential: Polynomial
    d0: PolyMatrix  # X^0 -> X^1, shape rank1 x rank0
    d1: PolyMatrix  # X^1 -> X^0, shape rank0 x rank1

    def __post_init__(self):
        if self.potential.ring != self.ring:
            raise AmbientMismatch("potential over the wrong ring")
        if self.d0.ncols != self.d1.nrows or self.d0.nrows != self.d1.ncols:
            raise ShapeMismatch(
                f"blocks {self.d0.nrows}x{self.d0.ncols} and "
                f"{self.d1.nrows}x{self.d1.ncols} do not compose"
            )

    @property
    def rank0(self) -> int:
        return self.d0.ncols

    @property
    def rank1(self) -> int:
        return self.d0.nrows

    def validate(self) -> bool:
        return validate_mf(self)

    def shift(self) -> "MatrixFactorisation":
        return shift_mf(self)

    def max_entry_degree(self) -> int:
        degree = 0
        for block in (self.d0, self.d1):
            for row in block.entries:
                for entry in row:
                    degree = max(degree, entry.total_degree())
        return degree


def validate_mf(mf: MatrixFactorisation) -> bool:
    """True iff d1 d0 = W I and d0 d1 = W I hold exactly."""
    w_id0 = identity(mf.ring, mf.rank0, mf.potential)
    w_id1 = identity(mf.ring, mf.rank1, mf.potential)
    return (mf.d1 * mf.d0 - w_id0).is_zero() and (mf.d0 * mf.d1 - w_id1).is_zero()


def shift_mf(mf: MatrixFactorisation) -> MatrixFactorisation:
    """The shift X[1]: gradings swapped, both blocks negated."""
    return MatrixFactorisation(mf.ring, mf.potential, d0=-mf.d1, d1=-mf.d0)


def direct_sum(a: MatrixFactorisation, b: MatrixFactorisation) -> MatrixFactorisation:
    if a.ring != b.ring or a.potential != b.potential:
        raise AmbientMismatch("direct sum needs a common potential")

    def blockdiag(m1: PolyMatrix, m2: PolyMatrix) -> PolyMatrix:
        ring = a.ring
        rows = []
        for i in range(m1.nrows):
            rows.append(tuple(m1.entries[i]) + tuple(ring.zero() for _ in range(m2.ncols)))
        for i in range(m2.nrows):
            rows.append(tuple(ring.zero() for _ in range(m1.ncols)) + tuple(m2.entries[i]))
        return PolyMatrix(ring, m1.nrows + m2.nrows, m1.ncols + m2.ncols, tuple(rows))

    return MatrixFactorisation(a.ring, a.potential, blockdiag(a.d0, b.d0), blockdiag(a.d1, b.d1))


@dataclass(frozen=True)
class MFMorphism:
    """Graded morphism between matrix factorisations.

    parity EVEN: b0: X^0 -> Y^0 and b1: X^1 -> Y^1.
    parity ODD:  b0: X^0 -> Y^1 and b1: X^1 -> Y^0.
    """

    source: MatrixFactorisation
    target: MatrixFactorisation
    parity: int
    b0: PolyMatrix
    b1: PolyMatrix

    def __post_init__(self):
        if self.source.ring != self.target.ring:
            raise AmbientMismatch("morphism between different rings")
        if self.parity not in (EVEN, ODD):
            raise ValueError("parity must be 0 (even) or 1 (odd)")
        x0, x1 = self.source.rank0, self.source.rank1
        y0, y1 = self.target.rank0, self.target.rank1
        want0 = (y0, x0) if self.parity == EVEN else (y1, x0)
        want1 = (y1, x1) if self.parity == EVEN else (y0, x1)
        if (self.b0.nrows, self.b0.ncols) != want0 or (self.b1.nrows, self.b1.ncols) != want1:
            raise ShapeMismatch(
                f"morphism blocks {self.b0.nrows}x{self.b0.ncols}, "
                f"{self.b1.nrows}x{self.b1.ncols} do not fit parity {self.parity}"
            )

    def is_zero(self) -> bool:
        return self.b0.is_zero() and self.b1.is_zero()

    def is_endomorphism(self) -> bool:
        return self.source == self.target

    def is_closed(self) -> bool:
        return hom_differential(self).is_zero()

    def add(self, other: "MFMorphism") -> "MFMorphism":
        self._compatible(other)
        return MFMorphism(self.source, self.target, self.parity, self.b0 + other.b0, self.b1 + other.b1)

    def sub(self, other: "MFMorphism") -> "MFMorphism":
        self._compatible(other)
        return MFMorphism(self.source, self.target, self.parity, self.b0 - other.b0, self.b1 - other.b1)

    def scale(self, scalar) -> "MFMorphism":
        return MFMorphism(self.source, self.target, self.parity, self.b0.scale(scalar), self.b1.scale(scalar))

    def equals(self, other: "MFMorphism") -> bool:
        return (
            self.parity == other.parity
            and (self.b0 - other.b0).is_zero()
            and (self.b1 - other.b1).is_zero()
        )

    def max_entry_degree(self) -> int:
        degree = 0
        for block in (self.b0, self.b1):
            for row in block.entries:
                for entry in row:
                    degree = max(degree, entry.total_degree())
        return degree

    def _compatible(self, other: "MFMorphism") -> None:
        if self.source != other.source or self.target != other.target or self.parity != other.parity:
            raise ShapeMismatch("morphisms are not compatible")


def identity_morphism(mf: MatrixFactorisation) -> MFMorphism:
    return MFMorphism(mf, mf, EVEN, identity(mf.ring, mf.rank0), identity(mf.ring, mf.rank1))


def zero_morphism(source: MatrixFactorisation, target: MatrixFactorisation, parity: int) -> MFMorphism:
    ring = source.ring
    if parity == EVEN:
        return MFMorphism(source, target, EVEN,
                          zeros(ring, target.rank0, source.rank0),
                          zeros(ring, target.rank1, source.rank1))
    return MFMorphism(source, target, ODD,
                      zeros(ring, target.rank1, source.rank0),
                      zeros(ring, target.rank0, source.rank1))


def differential_morphism(mf: MatrixFactorisation) -> MFMorphism:
    """The differential of X viewed as an odd endomorphism."""
    return MFMorphism(mf, mf, ODD, mf.d0, mf.d1)


def compose(g: MFMorphism, f: MFMorphism) -> MFMorphism:
    """g after f; parities add modulo 2."""
    if f.target != g.source:
        raise ShapeMismatch("composition through mismatched objects")
    # The block of g leaving the degree that f lands in from X^0 (resp X^1).
    g_after_b0 = g.b1 if f.parity == ODD else g.b0
    g_after_b1 = g.b0 if f.parity == ODD else g.b1
    return MFMorphism(
        f.source,
        g.target,
        (f.parity + g.parity) % 2,
        g_after_b0 * f.b0,
        g_after_b1 * f.b1,
    )


def hom_differential(f: MFMorphism) -> MFMorphism:
    """D(f) = d_Y f - (-1)^{|f|} f d_X; D(D(f)) = 0 exactly."""
    left = compose(differential_morphism(f.target), f)
    right = compose(f, differential_morphism(f.source))
    if f.parity == EVEN:
        return left.sub(right)
    return left.add(right)


def partial_d(mf: MatrixFactorisation, index: int) -> MFMorphism:
    """Entrywise partial derivative of the differential: an odd morphism
    with  partial_d d + d partial_d = (dW/dx_index) id."""
    return MFMorphism(mf, mf, ODD, mf.d0.diff(index), mf.d1.diff(index))


def transport_to_shift(f: MFMorphism) -> MFMorphism:
    """The same morphism viewed on the shifted objects (blocks swap)."""
    return MFMorphism(shift_mf(f.source), shift_mf(f.target), f.parity, f.b1, f.b0)


# -- linear-algebra view of morphism spaces ----------------------------------


def _monomials_below(ring: PolyRing, bound: int) -> List[Monomial]:
    """All monomials of total degree < bound, in ascending term order."""
    out: List[Monomial] = []

    def rec(prefix: Tuple[int, ...], remaining: int, index: int):
        if index == ring.n:
            out.append(prefix)
            return
        for e in range(remaining + 1):
            rec(prefix + (e,), remaining - e, index + 1)

    rec((), max(bound - 1, -1), 0) if bound > 0 else None
    out.sort(key=grevlex_key)
    return out


class _MorphismSpace:
    """Coordinates on morphisms of one parity with entry degrees < bound."""

    def __init__(self, source: MatrixFactorisation, target: MatrixFactorisation,
                 parity: int, bound: int):
        self.source = source
        self.target = target
        self.parity = parity
        self.bound = bound
        self.ring = source.ring
        self.monomials = _monomials_below(self.ring, bound)
        template = zero_morphism(source, target, parity)
        self.shapes = ((template.b0.nrows, template.b0.ncols),
                       (template.b1.nrows, template.b1.ncols))
        self.index: Dict[Tuple[int, int, int, Monomial], int] = {}
        self.slots: List[Tuple[int, int, int, Monomial]] = []
        for block, (rows, cols) in enumerate(self.shapes):
            for i in range(rows):
                for j in range(cols):
                    for mono in self.monomials:
                        self.index[(block, i, j, mono)] = len(self.slots)
                        self.slots.append((block, i, j, mono))

    @property
    def dimension(self) -> int:
        return len(self.slots)

    def coords(self, morphism: MFMorphism) -> linalg.SparseVec:
        vec: linalg.SparseVec = {}
        for block_index, block in enumerate((morphism.b0, morphism.b1)):
            for i in range(block.nrows):
                for j in range(block.ncols):
                    for mono, coeff in block.entries[i][j].terms.items():
                        slot = self.index.get((block_index, i, j, mono))
                        if slot is None:
                            raise ShapeMismatch(
                                "morphism has entries outside the degree window"
                            )
                        vec[slot] = coeff
        return vec

    def from_coords(self, vec: linalg.SparseVec) -> MFMorphism:
        blocks = [
            [[self.ring.zero() for _ in range(cols)] for _ in range(rows)]
            for rows, cols in self.shapes
        ]
        accum: Dict[Tuple[int, int, int], Dict[Monomial, Fraction]] = {}
        for slot, coeff in vec.items():
            block, i, j, mono = self.slots[slot]
            accum.setdefault((block, i, j), {})[mono] = coeff
        for (block, i, j), terms in accum.items():
            blocks[block][i][j] = Polynomial(self.ring, terms)
        b0 = matrix(self.ring, blocks[0], ncols=self.shapes[0][1])
        b1 = matrix(self.ring, blocks[1], ncols=self.shapes[1][1])
        return MFMorphism(self.source, self.target, self.parity, b0, b1)

    def basis_morphisms(self):
        for slot, (block, i, j, mono) in enumerate(self.slots):
            vec = {slot: Fraction(1)}
            yield slot, self.from_coords(vec)


@dataclass(frozen=True)
class ExtBasis:
    """Basis of the stable morphism space of one parity.

    Representatives are closed, pairwise independent modulo boundaries,
    and have entry degrees below the recorded truncation degree.
    """

    source: MatrixFactorisation
    target: MatrixFactorisation
    parity: int
    representatives: Tuple[MFMorphism, ...]
    truncation_degree: int

    @property
    def dimension(self) -> int:
        return len(self.representatives)


def _check_ext_inputs(x: MatrixFactorisation, y: MatrixFactorisation) -> None:
    if x.ring != y.ring or x.potential != y.potential:
        raise AmbientMismatch("Ext needs objects over one ring and potential")
    if not validate_mf(x) or not validate_mf(y):
        raise ShapeMismatch("Ext inputs must be valid matrix factorisations")


def _jacobian_top_degree(mf: MatrixFactorisation) -> int:
    ring = mf.ring
    partials = tuple(mf.potential.diff(i) for i in range(ring.n))
    qb = quotient_basis(cached_groebner(partials))  # NotZeroDimensional if not isolated
    return qb.top_degree()


def _boundary_vectors(space_h: _MorphismSpace, big: _MorphismSpace) -> List[linalg.SparseVec]:
    vectors = []
    for _, morphism in space_h.basis_morphisms():
        image = hom_differential(morphism)
        vectors.append(big.coords(image))
    return vectors


def _closed_vectors(space_f: _MorphismSpace, big: _MorphismSpace) -> List[linalg.SparseVec]:
    """Nullspace of the differential restricted to the truncated space."""
    rows_by_target: Dict[int, linalg.SparseVec] = {}
    for slot, morphism in space_f.basis_morphisms():
        image = big.coords(hom_differential(morphism))
        for target_slot, coeff in image.items():
            rows_by_target.setdefault(target_slot, {})[slot] = coeff
    rows = list(rows_by_target.values())
    kernel = linalg.nullspace(rows, space_f.dimension)
    return kernel


def ext_dimension_at(
    x: MatrixFactorisation, y: MatrixFactorisation, parity: int, truncation: int
) -> int:
    """Stable morphism dimension computed at one fixed truncation degree."""
    dim, _ = _ext_at(x, y, parity, truncation)
    return dim


def _ext_at(x, y, parity: int, truncation: int):
    delta = max(x.max_entry_degree(), y.max_entry_degree(), 1)
    space_f = _MorphismSpace(x, y, parity, truncation)
    space_h = _MorphismSpace(x, y, (parity + 1) % 2, truncation + delta)
    big = _MorphismSpace(x, y, parity, truncation + 2 * delta)

    closed = _closed_vectors(space_f, big)
    # Embed the closed vectors into the big coordinate space.
    embedded = []
    for vec in closed:
        morphism = space_f.from_coords(vec)
        embedded.append(big.coords(morphism))

    boundary_reducer = linalg.RowReducer()
    for vec in _boundary_vectors(space_h, big):
        boundary_reducer.add(vec)

    chosen: List[MFMorphism] = []
    chosen_reducer = linalg.RowReducer()
    for vec, small_vec in zip(embedded, closed):
        residual = boundary_reducer.residual(vec)
        if residual and chosen_reducer.add(residual):
            chosen.append(space_f.from_coords(small_vec))
    return len(chosen), chosen


def ext_basis(
    x: MatrixFactorisation,
    y: MatrixFactorisation,
    parity: int,
    max_truncation: int | None = None,
) -> ExtBasis:
    """Basis of closed morphisms modulo null-homotopies, by stabilization.

    The truncation degree N rises until the computed dimension agrees at
    N and N+1 and the stage-N representatives stay independent modulo
    the larger boundary space.  Raises NoStabilization with the dimension
    history if the bound is hit first; a loud failure, never a wrong
    answer.
    """
    _check_ext_inputs(x, y)
    if max_truncation is None:
        max_truncation = _jacobian_top_degree(x) + 2 * max(
            x.max_entry_degree(), y.max_entry_degree(), 1
        ) + 6
    history: List[int] = []
    previous: Optional[Tuple[int, List[MFMorphism]]] = None
    for truncation in range(1, max_truncation + 1):
        dim, reps = _ext_at(x, y, parity, truncation)
        history.append(dim)
        if previous is not None and previous[0] == dim:
            stable_truncation = truncation - 1
            if _reps_survive(x, y, parity, previous[1], truncation):
                return ExtBasis(x, y, parity, tuple(previous[1]), stable_truncation)
        previous = (dim, reps)
    raise NoStabilization(
        f"Ext dimension did not stabilize by truncation {max_truncation}; "
        f"history {history}"
    )


def _reps_survive(x, y, parity, reps: List[MFMorphism], truncation: int) -> bool:
    """Stage-N representatives must stay independent modulo the boundaries
    computed with the next truncation degree."""
    delta = max(x.max_entry_degree(), y.max_entry_degree(), 1)
    big = _MorphismSpace(x, y, parity, truncation + 2 * delta)
    space_h = _MorphismSpace(x, y, (parity + 1) % 2, truncation + delta)
    reducer = linalg.RowReducer()
    for vec in _boundary_vectors(space_h, big):
        reducer.add(vec)
    for rep in reps:
        residual = reducer.residual(big.coords(rep))
        if not residual or not reducer.add(residual):
            return False
    return True


def null_homotopy_witness(
    f: MFMorphism, degree_bound: int
) -> Optional[MFMorphism]:
    """A morphism h with D(h) = f and entries of degree <= degree_bound,
    or None when no such witness exists at this bound.

    Absence at a bound is a result, not an error; a closed morphism with
    no witness at a stabilized bound represents a nonzero stable class.
    """
    if not f.is_closed():
        raise ShapeMismatch("witness search needs a closed morphism")
    space_h = _MorphismSpace(f.source, f.target, (f.parity + 1) % 2, degree_bound + 1)
    delta = max(f.source.max_entry_degree(), f.target.max_entry_degree(), 1)
    big = _MorphismSpace(f.source, f.target, f.parity,
                         max(degree_bound + 1 + delta, f.max_entry_degree() + 1))
    target_vec = big.coords(f)

    rows_by_target: Dict[int, linalg.SparseVec] = {}
    for slot, morphism in space_h.basis_morphisms():
        image = big.coords(hom_differential(morphism))
        for target_slot, coeff in image.items():
            rows_by_target.setdefault(target_slot, {})[slot] = coeff
    order = sorted(set(rows_by_target) | set(target_vec))
    rows = [rows_by_target.get(t, {}) for t in order]
    rhs = [target_vec.get(t, Fraction(0)) for t in order]
    solution = linalg.solve(rows, rhs, space_h.dimension)
    if solution is None:
        return None
    witness = space_h.from_coords(solution)
    assert hom_differential(witness).sub(f).is_zero()
    return witness


# -- systems of parameters from the Jacobian ---------------------------------


def sop_parameters(
    potential: Polynomial, c_matrix: Sequence[Sequence[Fraction]]
) -> List[Polynomial]:
    """The first n-1 combinations w'_i = sum_j C_ij dW/dx_j."""
    ring = potential.ring
    n = ring.n
    partials = [potential.diff(j) for j in range(n)]
    out = []
    for i in range(n - 1):
        acc = ring.zero()
        for j in range(n):
            acc = acc + partials[j].scale(Fraction(c_matrix[i][j]))
        out.append(acc)
    return out


def sop_is_valid(potential: Polynomial, c_matrix: Sequence[Sequence[Fraction]]) -> bool:
    """True iff (W, t_1,...,t_{n-1}) is primary for the maximal ideal."""
    rows = [[Fraction(v) for v in row] for row in c_matrix]
    n = potential.ring.n
    if len(rows) != n or any(len(r) != n for r in rows):
        return False
    if linalg.det_dense(rows) == 0:
        return False
    t = sop_parameters(potential, rows)
    try:
        quotient_basis(cached_groebner(tuple([potential] + t)))
    except NotZeroDimensional:
        return False
    return True


def random_sop(
    potential: Polynomial, seed: int, attempts: int = 200
) -> Tuple[Tuple[Fraction, ...], ...]:
    """Invertible rational matrix C whose first n-1 rows combine the
    partial derivatives of W into a system of parameters for S/(W).

    Deterministic given the seed; integer entries sampled from [-B, B]
    with B growing as attempts fail.  Raises SearchExhausted with
    diagnostics when no valid C is found.
    """
    ring = potential.ring
    n = ring.n
    partials = tuple(potential.diff(j) for j in range(n))
    quotient_basis(cached_groebner(partials))  # isolated singularity required
    rng = random.Random(seed)
    rejected = 0
    for attempt in range(attempts):
        box = 1 << min(rejected // 5, 7)
        candidate = [
            [Fraction(rng.randint(-box, box)) for _ in range(n)] for _ in range(n)
        ]
        if sop_is_valid(potential, candidate):
            return tuple(tuple(row) for row in candidate)
        rejected += 1
    raise SearchExhausted(
        f"no valid parameter matrix after {attempts} attempts (seed {seed}); "
        "last box size " + str(1 << min(rejected // 5, 7))
    )
