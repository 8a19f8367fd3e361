"""Residue pairings on matrix factorisations.

Two routes to the same scalar, kept deliberately independent so each
can check the other:

* the Kapustin-Li trace: for a closed endomorphism a of parity n mod 2,

    kl_trace(a) = (1/n!) (-1)^binom(n-1, 2)
                  Res[ str(a d(d_X)^wedge n) / dW/dx_1, ..., dW/dx_n ],

  where d(d_X)^wedge n is the signed sum over all permutations of
  products of the partial derivatives of the differential, and str is
  the supertrace (even block trace minus odd block trace);

* the system-of-parameters pretrace: pick an invertible matrix C whose
  first n-1 rows turn the partials of W into null-homotopies lambda_i
  for the parameters t_i, form the degree-zero operator

    L = (-1)^F a lambda_1 ... lambda_{n-1} d_X,

  and take the generalised fraction

    <<a>> = (-1)^binom(d+1, 2) [ tr(L on the even block) / t_1,...,t_d ]

  over R = S/(W), with d = n - 1.  Applying the dualising functional
  zeta gives back kl_trace(a), for every valid choice of C.

All sign bookkeeping lives in the two helpers at the top; every
operation routes through them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from . import linalg
from .errors import AmbientMismatch, NotZeroDimensional, ShapeMismatch
from .ideals import (
    GroebnerBasis,
    QuotientBasis,
    cached_groebner,
    normal_form,
    quotient_basis,
)
from .matrices import PolyMatrix
from .mf import (
    EVEN,
    ODD,
    ExtBasis,
    MatrixFactorisation,
    MFMorphism,
    compose,
    differential_morphism,
    ext_basis,
    partial_d,
    sop_is_valid,
    sop_parameters,
)
from .poly import Monomial, Polynomial, PolyRing
from .residues import (
    GeneralisedFraction,
    ResidueContext,
    make_fraction,
    residue_symbol,
    zeta,
)

# -- sign authority -----------------------------------------------------------
# Every sign in this module comes from these two functions plus the parity
# twist (-1)^F, which on the even block acts as +1 and is therefore
# invisible in the degree-zero trace below.


def sign_binom2(k: int) -> int:
    """(-1)^(k choose 2)."""
    return -1 if (k * (k - 1) // 2) % 2 else 1


def pretrace_sign(d: int) -> int:
    """Front sign of the pretrace fraction for Krull dimension d."""
    return sign_binom2(d + 1)


def kl_normalization(n: int) -> Fraction:
    """(1/n!) (-1)^binom(n-1, 2), the trace-formula prefactor."""
    return Fraction(sign_binom2(n - 1), factorial(n))


# -- supertraces and wedge powers ---------------------------------------------


def supertrace(f: MFMorphism) -> Polynomial:
    """Trace of the grading twist composed with f.

    Even endomorphisms give tr(even block) - tr(odd block); odd
    endomorphisms have no diagonal blocks, so the supertrace is zero.
    """
    if not f.is_endomorphism():
        raise ShapeMismatch("supertrace needs an endomorphism")
    if f.parity == ODD:
        return f.source.ring.zero()
    return f.b0.trace() - f.b1.trace()


def wedge_power(mf: MatrixFactorisation) -> MFMorphism:
    """Signed sum over all n! orderings of products of partial_d.

    Parity n mod 2; for n = 1 this is the single partial derivative, for
    n = 2 the commutator of the two partial derivatives.
    """
    ring = mf.ring
    n = ring.n
    partials = [partial_d(mf, i) for i in range(n)]
    total: Optional[MFMorphism] = None
    for perm in permutations(range(n)):
        inversions = sum(
            1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b]
        )
        product = partials[perm[0]]
        for index in perm[1:]:
            product = compose(product, partials[index])
        signed = product if inversions % 2 == 0 else product.scale(-1)
        total = signed if total is None else total.add(signed)
    assert total is not None
    return total


def _require_traceable(alpha: MFMorphism) -> MatrixFactorisation:
    if not alpha.is_endomorphism():
        raise ShapeMismatch("trace needs an endomorphism")
    mf = alpha.source
    if alpha.parity != mf.ring.n % 2:
        raise ShapeMismatch(
            f"parity {alpha.parity} cannot be traced in {mf.ring.n} variables"
        )
    if not alpha.is_closed():
        raise ShapeMismatch("trace is only defined on closed morphisms")
    return mf


def _jacobian(mf: MatrixFactorisation) -> Tuple[Polynomial, ...]:
    return tuple(mf.potential.diff(i) for i in range(mf.ring.n))


def kl_trace(alpha: MFMorphism) -> Fraction:
    """The residue trace of a closed endomorphism of parity n mod 2.

    Vanishes on null-homotopic morphisms and pairs the stable morphism
    spaces nondegenerately.
    """
    mf = _require_traceable(alpha)
    n = mf.ring.n
    numerator = supertrace(compose(alpha, wedge_power(mf)))
    value = residue_symbol(numerator, _jacobian(mf))
    return kl_normalization(n) * value


def kl_pair(psi: MFMorphism, phi: MFMorphism) -> Fraction:
    """<psi, phi> = kl_trace(psi compose phi); parities must sum to n mod 2."""
    if phi.target != psi.source or psi.target != phi.source:
        raise ShapeMismatch("pairing needs morphisms X -> Y and Y -> X")
    return kl_trace(compose(psi, phi))


# -- pretrace through generalised fractions -----------------------------------


def _lambda_homotopies(
    mf: MatrixFactorisation, c_matrix: Sequence[Sequence[Fraction]]
) -> List[MFMorphism]:
    """lambda_i = sum_j C_ij partial_j(d_X) for the first n-1 rows."""
    n = mf.ring.n
    partials = [partial_d(mf, j) for j in range(n)]
    out = []
    for i in range(n - 1):
        acc = None
        for j in range(n):
            coeff = Fraction(c_matrix[i][j])
            if coeff == 0:
                continue
            term = partials[j].scale(coeff)
            acc = term if acc is None else acc.add(term)
        if acc is None:
            raise ShapeMismatch(f"row {i} of the parameter matrix is zero")
        out.append(acc)
    return out


def _pretrace_operator(
    alpha: MFMorphism, lambdas: Sequence[MFMorphism]
) -> MFMorphism:
    """alpha lambda_1 ... lambda_d d_X as a graded endomorphism (even)."""
    op = differential_morphism(alpha.source)
    for lam in reversed(list(lambdas)):
        op = compose(lam, op)
    return compose(alpha, op)


@dataclass(frozen=True)
class PretraceResult:
    """The fraction <<alpha>> with its scalar zeta value and provenance."""

    fraction: GeneralisedFraction
    scalar: Fraction
    c_matrix: Tuple[Tuple[Fraction, ...], ...]
    parameters: Tuple[Polynomial, ...]


def pretrace(
    alpha: MFMorphism, c_matrix: Sequence[Sequence[Fraction]]
) -> PretraceResult:
    """Evaluate <<alpha>> over R = S/(W) with the parameters chosen by C.

    The scalar is zeta of the fraction, with denominators ordered
    (W, t_1, ..., t_d); it equals kl_trace(alpha) for every valid C.
    """
    mf = _require_traceable(alpha)
    ring = mf.ring
    n = ring.n
    d = n - 1
    rows = tuple(tuple(Fraction(v) for v in row) for row in c_matrix)
    if not sop_is_valid(mf.potential, rows):
        raise NotZeroDimensional(
            "the parameter matrix does not produce a system of parameters"
        )
    params = tuple(sop_parameters(mf.potential, rows))
    lambdas = _lambda_homotopies(mf, rows)
    operator = _pretrace_operator(alpha, lambdas)
    trace_even = operator.b0.trace()
    numerator = trace_even.scale(pretrace_sign(d))
    ctx = ResidueContext(ring, (mf.potential,))
    fraction = make_fraction(ctx, numerator, params)
    return PretraceResult(fraction, zeta(fraction), rows, params)


def pretrace_block_traces(
    alpha: MFMorphism, c_matrix: Sequence[Sequence[Fraction]]
) -> Tuple[Polynomial, Polynomial, Tuple[Polynomial, ...]]:
    """Degree-0 and degree-1 traces of the twisted operator, plus the
    parameters; the two traces agree modulo (W, t)."""
    mf = _require_traceable(alpha)
    rows = tuple(tuple(Fraction(v) for v in row) for row in c_matrix)
    params = tuple(sop_parameters(mf.potential, rows))
    operator = _pretrace_operator(alpha, _lambda_homotopies(mf, rows))
    return operator.b0.trace(), -operator.b1.trace(), params


# -- Jacobi algebra and boundary-bulk -----------------------------------------


@dataclass(frozen=True)
class JacobiAlgebra:
    """The finite-dimensional quotient by the partial derivatives of W,
    with its residue functional and Frobenius pairing."""

    potential: Polynomial
    quotient: QuotientBasis
    gamma: Dict[Monomial, Fraction]
    gram: Tuple[Tuple[Fraction, ...], ...]
    rank: int

    @property
    def milnor(self) -> int:
        return self.quotient.dimension

    @property
    def is_frobenius(self) -> bool:
        return self.rank == self.quotient.dimension

    def gamma_value(self, element: Polynomial) -> Fraction:
        """The residue functional on an arbitrary ring element."""
        partials = tuple(self.potential.diff(i) for i in range(self.potential.ring.n))
        return residue_symbol(element, partials)


def jacobi_algebra(potential: Polynomial) -> JacobiAlgebra:
    """Monomial basis, Milnor number, residue functional and Gram matrix.

    Raises NotZeroDimensional unless the singularity is isolated at the
    origin.  The Gram matrix gamma(m_i m_j) is symmetric and must have
    full rank (the algebra is Frobenius); the rank is reported so the
    caller can check.
    """
    ring = potential.ring
    partials = tuple(potential.diff(i) for i in range(ring.n))
    gb = cached_groebner(partials)
    qb = quotient_basis(gb)
    gamma = {m: residue_symbol(ring.monomial(m), partials) for m in qb.monomials}
    size = qb.dimension
    gram_rows = []
    for i in range(size):
        row = []
        for j in range(size):
            product = tuple(a + b for a, b in zip(qb.monomials[i], qb.monomials[j]))
            row.append(residue_symbol(ring.monomial(product), partials))
        gram_rows.append(tuple(row))
    gram = tuple(gram_rows)
    rank = linalg.rank_dense(gram)
    return JacobiAlgebra(potential, qb, gamma, gram, rank)


def boundary_bulk(psi: MFMorphism) -> Polynomial:
    """Image of a closed endomorphism in the Jacobi algebra, in normal
    form modulo the partial derivatives of W.

    The trace factors through it: kl_trace = gamma_value of this class.
    """
    mf = _require_traceable(psi)
    n = mf.ring.n
    raw = supertrace(compose(psi, wedge_power(mf))).scale(kl_normalization(n))
    gb = cached_groebner(_jacobian(mf))
    return normal_form(raw, gb)


# -- Gram matrices between stable morphism spaces ------------------------------


@dataclass(frozen=True)
class GramBlock:
    """Pairing matrix between Ext bases of complementary parities."""

    basis_forward: ExtBasis   # morphisms X -> Y of the chosen parity
    basis_backward: ExtBasis  # morphisms Y -> X of the complementary parity
    entries: Tuple[Tuple[Fraction, ...], ...]
    rank: int

    @property
    def dimensions(self) -> Tuple[int, int]:
        return (self.basis_backward.dimension, self.basis_forward.dimension)

    @property
    def nondegenerate(self) -> bool:
        return (
            self.basis_forward.dimension == self.basis_backward.dimension
            and self.rank == self.basis_forward.dimension
        )


def gram_matrix(
    x: MatrixFactorisation,
    y: MatrixFactorisation,
    parity: int,
    max_truncation: int | None = None,
) -> GramBlock:
    """Matrix of kl_pair values between ext_basis(x, y, parity) and
    ext_basis(y, x, (n - parity) mod 2), with its exact rank.

    A dimension mismatch between the two spaces is reported through the
    nondegenerate flag (it indicates a truncation failure upstream);
    the matrix itself is still returned.
    """
    n = x.ring.n
    forward = ext_basis(x, y, parity, max_truncation=max_truncation)
    backward = ext_basis(y, x, (n - parity) % 2, max_truncation=max_truncation)
    entries = tuple(
        tuple(kl_pair(back, fwd) for fwd in forward.representatives)
        for back in backward.representatives
    )
    rank = linalg.rank_dense(entries) if entries else 0
    return GramBlock(forward, backward, entries, rank)
