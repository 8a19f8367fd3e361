"""Residue symbols, generalised fractions and the dualising functional.

The residue symbol Res[g / f_1,...,f_n] over the power series ring in n
variables is computed through the transformation rule: lift each
variable power x_i^{e_i} into the denominator ideal, take the
determinant of the cofactor matrix, and read off one coefficient,

    Res[g / f] = coefficient of x^(e-1) in g * det(a_ij),

where x_i^{e_i} = sum_j a_ij f_j.  The normalization is the coordinate
volume form: Res[1 / x_1,...,x_n] = 1.

A generalised fraction [r / t_1,...,t_d] represents a class in top
local cohomology of the complete intersection R = S/(f_1,...,f_c); it
vanishes iff the numerator lies in (f, t).  The dualising functional is

    zeta [r / t] = Res[r / f_1,...,f_c, t_1,...,t_d],

which is linear in the numerator, kills zero fractions, and does not
vanish on the socle.  Denominator order is significant: transposing two
denominators negates the class.

Everything here works with polynomial representatives.  For fractions
killed by high powers of the variables this loses nothing, which is the
only regime the constructors admit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .errors import AmbientMismatch, NotZeroDimensional, ShapeMismatch
from .ideals import (
    GroebnerBasis,
    cached_groebner,
    in_ideal,
    normal_form,
    power_in_ideal,
    quotient_basis,
    reduce_with_cofactors,
)
from .matrices import determinant, matrix
from .poly import Polynomial, PolyRing


def residue_symbol(numerator: Polynomial, denominators: Sequence[Polynomial]) -> Fraction:
    """Grothendieck residue symbol over the ambient ring, exactly.

    Requires exactly n denominators generating an ideal primary for the
    maximal ideal (raises NotZeroDimensional otherwise).  Linear in the
    numerator, vanishes when the numerator lies in the denominator
    ideal, and obeys the transformation rule.
    """
    denominators = tuple(denominators)
    if not denominators:
        raise ShapeMismatch("residue symbol needs at least one denominator")
    ring = denominators[0].ring
    if numerator.ring != ring:
        raise AmbientMismatch("numerator over the wrong ring")
    if len(denominators) != ring.n:
        raise ShapeMismatch(
            f"need {ring.n} denominators for {ring.n} variables, got {len(denominators)}"
        )
    gb = cached_groebner(denominators)
    exponents: List[int] = []
    rows: List[List[Polynomial]] = []
    for i in range(ring.n):
        e, cofactors = power_in_ideal(i, gb)
        exponents.append(e)
        rows.append(cofactors)
    det = determinant(matrix(ring, rows))
    target = tuple(e - 1 for e in exponents)
    return (numerator * det).coefficient(target)


@dataclass(frozen=True)
class ResidueContext:
    """Ambient ring S plus the relations cutting out R = S/(f_1,...,f_c).

    c = 0 means R = S.  Groebner data for the relations and for relation
    plus denominator systems is cached; the cache is write-once per key.
    """

    ring: PolyRing
    relations: Tuple[Polynomial, ...]
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        for f in self.relations:
            if f.ring != self.ring:
                raise AmbientMismatch("relation over the wrong ring")
            if f.is_zero():
                raise ValueError("zero relation is not a regular element")
        if len(self.relations) > self.ring.n:
            raise ValueError("more relations than variables")

    @property
    def codimension(self) -> int:
        return len(self.relations)

    @property
    def fraction_length(self) -> int:
        """d = n - c, the number of denominators a fraction carries."""
        return self.ring.n - len(self.relations)

    def groebner(self, extra: Sequence[Polynomial] = ()) -> GroebnerBasis:
        key = tuple(p.key() for p in extra)
        found = self._cache.get(key)
        if found is None:
            found = cached_groebner(tuple(extra) + self.relations)
            self._cache[key] = found
        return found

    def fraction(self, numerator: Polynomial, denominators: Sequence[Polynomial]):
        return make_fraction(self, numerator, denominators)


@dataclass(frozen=True)
class GeneralisedFraction:
    """A class [numerator / t_1,...,t_d] in top local cohomology of R.

    The denominator list is ordered and never silently reordered; two
    fractions are the same class iff fraction_equal says so, not iff
    they are structurally equal.
    """

    context: ResidueContext
    numerator: Polynomial
    denominators: Tuple[Polynomial, ...]

    def is_zero(self) -> bool:
        return fraction_is_zero(self)

    def equals(self, other: "GeneralisedFraction") -> bool:
        return fraction_equal(self, other)

    def scale(self, scalar) -> "GeneralisedFraction":
        if isinstance(scalar, Polynomial):
            return GeneralisedFraction(self.context, self.numerator * scalar, self.denominators)
        return GeneralisedFraction(self.context, self.numerator.scale(scalar), self.denominators)

    def __str__(self):
        denoms = ", ".join(str(t) for t in self.denominators)
        return f"[{self.numerator} / {denoms}]"


def make_fraction(
    ctx: ResidueContext, numerator: Polynomial, denominators: Sequence[Polynomial]
) -> GeneralisedFraction:
    """Construct a fraction, checking the system-of-parameters condition.

    The combined ideal (relations, denominators) must be zero-dimensional;
    NotZeroDimensional is raised otherwise (e.g. a denominator vanishing
    on a positive-dimensional subset of the hypersurface).
    """
    denominators = tuple(denominators)
    if numerator.ring != ctx.ring:
        raise AmbientMismatch("numerator over the wrong ring")
    for t in denominators:
        if t.ring != ctx.ring:
            raise AmbientMismatch("denominator over the wrong ring")
    if len(denominators) != ctx.fraction_length:
        raise ShapeMismatch(
            f"expected {ctx.fraction_length} denominators, got {len(denominators)}"
        )
    quotient_basis(ctx.groebner(denominators))  # raises NotZeroDimensional
    return GeneralisedFraction(ctx, numerator, denominators)


def fraction_is_zero(fraction: GeneralisedFraction) -> bool:
    """True iff the class vanishes, i.e. the numerator lies in (f, t)."""
    gb = fraction.context.groebner(fraction.denominators)
    return in_ideal(fraction.numerator, gb)


def _power_into(
    power_base: Polynomial, gb: GroebnerBasis, count: int, bound: int
) -> Tuple[int, List[Polynomial]]:
    """Smallest N with power_base^N in the ideal, with cofactors against
    the first `count` original generators of gb."""
    acc = power_base.ring.one()
    for exponent in range(1, bound + 1):
        acc = acc * power_base
        remainder, cofactors = reduce_with_cofactors(acc, gb)
        if remainder.is_zero():
            return exponent, cofactors[:count]
    raise NotZeroDimensional(
        f"no power of {power_base} up to {bound} lies in the target ideal"
    )


def fraction_equal(a: GeneralisedFraction, b: GeneralisedFraction) -> bool:
    """Semantic equality of fraction classes via the transformation rule.

    Both fractions are rewritten over the common denominators
    u_i = a.t_i^{N_i}, where N_i is minimal with a.t_i^{N_i} in
    (f, b.t): the first fraction picks up the diagonal cofactors
    prod a.t_i^{N_i 1}, the second the cofactor determinant from the
    division of each u_i by (b.t, f).  The rewritten numerators are then
    compared modulo (f, u).  Powers keep (f, u) zero-dimensional for
    every input pair, including permuted denominator lists.
    """
    if a.context.ring != b.context.ring or a.context.relations != b.context.relations:
        raise AmbientMismatch("fractions over different contexts")
    ctx = a.context
    if len(a.denominators) != len(b.denominators):
        raise ShapeMismatch("fractions of different length")
    d = len(a.denominators)
    if a.denominators == b.denominators:
        gb = ctx.groebner(a.denominators)
        return in_ideal(a.numerator - b.numerator, gb)

    gb_b = ctx.groebner(b.denominators)
    bound = max(quotient_basis(gb_b).dimension, 1)
    ring = ctx.ring

    new_denoms: List[Polynomial] = []
    det_a = ring.one()
    rows_b: List[List[Polynomial]] = []
    for i in range(d):
        t = a.denominators[i]
        exponent, cof = _power_into(t, gb_b, d, bound)
        new_denoms.append(t ** exponent)
        det_a = det_a * t ** (exponent - 1)
        rows_b.append(cof)
    det_b = determinant(matrix(ring, rows_b, ncols=d)) if d else ring.one()

    lhs = a.numerator * det_a
    rhs = b.numerator * det_b
    gb_u = ctx.groebner(tuple(new_denoms))
    return in_ideal(lhs - rhs, gb_u)


def zeta(fraction: GeneralisedFraction) -> Fraction:
    """The dualising functional: residue over the ambient ring with the
    relations prepended to the denominators."""
    full = fraction.context.relations + fraction.denominators
    return residue_symbol(fraction.numerator, full)
