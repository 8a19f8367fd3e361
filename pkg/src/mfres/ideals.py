"""Groebner bases with cofactor tracking.

Plain Buchberger over the rationals in graded reverse lexicographic
order, with the normal (smallest lcm first) pair selection and the
coprime-leading-term skip.  Every basis element carries its expression
as a combination of the original generators, and division reports
cofactors against the original generators too; the combination
identities are exact and testable by expansion.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from .errors import AmbientMismatch, NotZeroDimensional
from .poly import (
    Monomial,
    Polynomial,
    PolyRing,
    grevlex_key,
    monomial_div,
    monomial_divides,
    monomial_lcm,
    monomial_mul,
)


@dataclass(frozen=True)
class GroebnerBasis:
    """Reduced Groebner basis plus the log expressing it over the generators.

    basis[i] == sum_j cofactor_log[i][j] * generators[j], exactly.
    """

    ring: PolyRing
    generators: Tuple[Polynomial, ...]
    basis: Tuple[Polynomial, ...]
    cofactor_log: Tuple[Tuple[Polynomial, ...], ...]

    @property
    def leading_monomials(self) -> Tuple[Monomial, ...]:
        return tuple(g.leading_monomial() for g in self.basis)


@dataclass(frozen=True)
class QuotientBasis:
    """Monomial basis of a zero-dimensional quotient ring."""

    ideal: GroebnerBasis
    monomials: Tuple[Monomial, ...]

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    def top_degree(self) -> int:
        if not self.monomials:
            return 0
        return max(sum(m) for m in self.monomials)


def _divide(
    p: Polynomial, divisors: Sequence[Polynomial]
) -> Tuple[Polynomial, List[Polynomial]]:
    """Multivariate division: p = sum quotients[i]*divisors[i] + remainder,
    no remainder term divisible by a divisor's leading term."""
    ring = p.ring
    quotients = [ring.zero() for _ in divisors]
    remainder_terms: Dict[Monomial, Fraction] = {}
    work = dict(p.terms)
    lts = [(d.leading_monomial(), d.leading_coefficient()) if d else None for d in divisors]
    while work:
        mono = max(work, key=grevlex_key)
        coeff = work.pop(mono)
        for i, lt in enumerate(lts):
            if lt is None:
                continue
            lm, lc = lt
            if monomial_divides(lm, mono):
                factor_mono = monomial_div(mono, lm)
                factor_coeff = coeff / lc
                quotients[i] = quotients[i] + ring.monomial(factor_mono, factor_coeff)
                reduced = divisors[i].mul_monomial(factor_mono, factor_coeff)
                for m, c in reduced.terms.items():
                    if m == mono:
                        continue
                    new = work.get(m, Fraction(0)) - c
                    if new == 0:
                        work.pop(m, None)
                    else:
                        work[m] = new
                break
        else:
            remainder_terms[mono] = remainder_terms.get(mono, Fraction(0)) + coeff
    return Polynomial(ring, remainder_terms), quotients


def _divide_tracked(
    p: Polynomial,
    cof: List[Polynomial],
    items: Sequence[Tuple[Polynomial, List[Polynomial]]],
) -> Tuple[Polynomial, List[Polynomial]]:
    """Divide p by the tracked items, propagating generator cofactors."""
    remainder, quotients = _divide(p, [g for g, _ in items])
    out = list(cof)
    for q, (_, gcof) in zip(quotients, items):
        if q.is_zero():
            continue
        for j, c in enumerate(gcof):
            out[j] = out[j] - q * c
    return remainder, out


def groebner_basis(gens: Sequence[Polynomial]) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by gens.

    The zero ideal (all generators zero) yields an empty basis.
    """
    gens = tuple(gens)
    if not gens:
        raise ValueError("need at least one generator")
    ring = gens[0].ring
    for g in gens:
        if g.ring != ring:
            raise AmbientMismatch("generators over different rings")

    def unit_cof(index: int) -> List[Polynomial]:
        return [ring.one() if j == index else ring.zero() for j in range(len(gens))]

    items: List[Tuple[Polynomial, List[Polynomial]]] = []
    for i, g in enumerate(gens):
        if g.is_zero():
            continue
        lc = g.leading_coefficient()
        items.append((g.scale(1 / lc), [c.scale(1 / lc) for c in unit_cof(i)]))

    pairs = {(i, j) for i in range(len(items)) for j in range(i)}
    while pairs:
        # Normal strategy: smallest lcm of leading monomials first.
        i, j = min(
            pairs,
            key=lambda ij: (
                grevlex_key(
                    monomial_lcm(
                        items[ij[0]][0].leading_monomial(),
                        items[ij[1]][0].leading_monomial(),
                    )
                ),
                ij,
            ),
        )
        pairs.remove((i, j))
        gi, cof_i = items[i]
        gj, cof_j = items[j]
        lm_i, lm_j = gi.leading_monomial(), gj.leading_monomial()
        lcm = monomial_lcm(lm_i, lm_j)
        if lcm == monomial_mul(lm_i, lm_j):
            continue  # coprime leading terms: S-polynomial reduces to zero
        mono_i = monomial_div(lcm, lm_i)
        mono_j = monomial_div(lcm, lm_j)
        spoly = gi.mul_monomial(mono_i, Fraction(1)) - gj.mul_monomial(mono_j, Fraction(1))
        scof = [
            a.mul_monomial(mono_i, Fraction(1)) - b.mul_monomial(mono_j, Fraction(1))
            for a, b in zip(cof_i, cof_j)
        ]
        remainder, rcof = _divide_tracked(spoly, scof, items)
        if remainder.is_zero():
            continue
        lc = remainder.leading_coefficient()
        items.append((remainder.scale(1 / lc), [c.scale(1 / lc) for c in rcof]))
        new = len(items) - 1
        pairs.update((new, k) for k in range(new))

    # Minimalize: drop elements whose leading term another one divides.
    keep: List[int] = []
    for i, (g, _) in enumerate(items):
        lm = g.leading_monomial()
        if any(
            monomial_divides(items[k][0].leading_monomial(), lm)
            for k in range(len(items))
            if k != i and (k in keep or k > i)
        ):
            continue
        keep.append(i)
    minimal = [items[i] for i in keep]

    # Inter-reduce tails: leading terms are pairwise indivisible, so one
    # full division pass per element leaves a reduced basis.
    reduced: List[Tuple[Polynomial, List[Polynomial]]] = []
    for i, (g, cof) in enumerate(minimal):
        others = [minimal[k] for k in range(len(minimal)) if k != i]
        remainder, rcof = _divide_tracked(g, cof, others)
        reduced.append((remainder, rcof))

    reduced.sort(key=lambda item: grevlex_key(item[0].leading_monomial()))
    return GroebnerBasis(
        ring,
        gens,
        tuple(g for g, _ in reduced),
        tuple(tuple(c) for _, c in reduced),
    )


@lru_cache(maxsize=512)
def _groebner_cached(gens: Tuple[Polynomial, ...]) -> GroebnerBasis:
    return groebner_basis(gens)


def cached_groebner(gens: Sequence[Polynomial]) -> GroebnerBasis:
    """Memoized groebner_basis; inputs are immutable polynomials."""
    return _groebner_cached(tuple(gens))


def reduce_with_cofactors(
    p: Polynomial, gb: GroebnerBasis
) -> Tuple[Polynomial, List[Polynomial]]:
    """Normal form of p plus cofactors against the ORIGINAL generators.

    p == sum cofactors[j] * gb.generators[j] + remainder, exactly, and no
    remainder term is divisible by a basis leading term.
    """
    if p.ring != gb.ring:
        raise AmbientMismatch("polynomial over the wrong ring")
    remainder, quotients = _divide(p, gb.basis)
    cofactors = [gb.ring.zero() for _ in gb.generators]
    for q, log in zip(quotients, gb.cofactor_log):
        if q.is_zero():
            continue
        for j, c in enumerate(log):
            cofactors[j] = cofactors[j] + q * c
    return remainder, cofactors


def normal_form(p: Polynomial, gb: GroebnerBasis) -> Polynomial:
    return _divide(p, gb.basis)[0]


def in_ideal(p: Polynomial, gb: GroebnerBasis) -> bool:
    return normal_form(p, gb).is_zero()


def quotient_basis(gb: GroebnerBasis) -> QuotientBasis:
    """Standard monomials of an ideal primary for the maximal ideal.

    Raises NotZeroDimensional when some variable has no pure power among
    the leading terms (infinite-dimensional quotient) or when a variable
    is not nilpotent in the quotient (zeros away from the origin, e.g. a
    singularity that is not isolated at the origin).
    """
    ring = gb.ring
    n = ring.n
    lms = gb.leading_monomials
    bounds: List[int] = []
    for i in range(n):
        pure = [m[i] for m in lms if all(e == 0 for k, e in enumerate(m) if k != i)]
        if not pure:
            raise NotZeroDimensional(
                f"no pure power of {ring.variables[i]} among leading terms "
                f"{[str(Polynomial(ring, {m: Fraction(1)})) for m in lms]}"
            )
        bounds.append(min(pure))

    def boxes(prefix: Tuple[int, ...], index: int):
        if index == n:
            yield prefix
            return
        for e in range(bounds[index]):
            yield from boxes(prefix + (e,), index + 1)

    standard = [
        m for m in boxes((), 0) if not any(monomial_divides(lm, m) for lm in lms)
    ]
    standard.sort(key=grevlex_key)

    # Finite quotient dimension only says the zero set is finite; demand
    # every variable be nilpotent so the zero set is the origin alone.
    nil_bound = max(len(standard), 1)
    for i in range(n):
        exps = [0] * n
        exps[i] = nil_bound
        if not normal_form(ring.monomial(exps), gb).is_zero():
            raise NotZeroDimensional(
                f"{ring.variables[i]} is not nilpotent modulo the ideal: "
                "the zero set is finite but not concentrated at the origin"
            )
    return QuotientBasis(gb, tuple(standard))


def power_in_ideal(index: int, gb: GroebnerBasis) -> Tuple[int, List[Polynomial]]:
    """Smallest e with x_index^e in the ideal, plus cofactors a_j with
    x_index^e == sum_j a_j * gb.generators[j]."""
    ring = gb.ring
    if not 0 <= index < ring.n:
        raise IndexError(f"variable index {index} out of range")
    qb = quotient_basis(gb)  # raises NotZeroDimensional when appropriate
    cap = max(qb.dimension, 1)
    for e in range(1, cap + 1):
        exps = [0] * ring.n
        exps[index] = e
        power = ring.monomial(exps)
        remainder, cofactors = reduce_with_cofactors(power, gb)
        if remainder.is_zero():
            return e, cofactors
    raise NotZeroDimensional(
        f"no power of {ring.variables[index]} up to {cap} lies in the ideal"
    )


def socle_generators(gb: GroebnerBasis) -> List[Polynomial]:
    """Basis of the socle of the Artinian quotient, via exact linear algebra.

    The socle is the subspace killed by every variable; for quotients by
    a length-n regular sequence it is one-dimensional.
    """
    from . import linalg

    ring = gb.ring
    qb = quotient_basis(gb)
    basis = qb.monomials
    if not basis:
        return []
    position = {m: k for k, m in enumerate(basis)}
    # Constraint rows: for every variable, every coordinate of
    # x_i * (candidate) in the monomial basis must vanish.
    constraint_rows: List[Dict[int, Fraction]] = []
    for i in range(ring.n):
        columns = []
        for mono in basis:
            shifted = list(mono)
            shifted[i] += 1
            nf = normal_form(ring.monomial(shifted), gb)
            columns.append({position[m]: c for m, c in nf.terms.items()})
        for out_index in range(len(basis)):
            row = {
                col: column[out_index]
                for col, column in enumerate(columns)
                if out_index in column
            }
            if row:
                constraint_rows.append(row)
    kernel = linalg.nullspace(constraint_rows, len(basis))
    out = []
    for vec in kernel:
        poly = ring.zero()
        for col, coeff in sorted(vec.items()):
            poly = poly + ring.monomial(basis[col], coeff)
        out.append(poly)
    return out
