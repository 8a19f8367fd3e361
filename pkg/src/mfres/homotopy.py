"""Finite complexes of free modules and the homological perturbation lemma.

A FiniteComplex stores ranks and differentials over a degree window;
the differential raises degree by one and squares to zero exactly.
A deformation retract datum (iota, p, h) between complexes L and M
satisfies p iota = 1 and iota p = 1 + bh + hb, both as exact matrix
identities.  Perturbing the big differential by a small (nilpotent)
mu transfers the datum through the usual geometric series

    A = sum_k (mu h)^k mu,   iota' = iota + h A iota,   h' = h + h A h,

keeping p and the small complex unchanged; these are exactly the
transferred maps when p h = 0 and p mu = 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

from .errors import HypothesisViolated, NotSmall, ShapeMismatch
from .matrices import PolyMatrix, identity, zeros
from .poly import PolyRing


@dataclass(frozen=True)
class FiniteComplex:
    """Complex of finite free modules concentrated in degrees [lo, hi].

    diffs[i] is the matrix of the degree-raising differential from
    degree i to degree i+1; absent keys mean zero.  b compose b = 0 is
    checked at construction.
    """

    ring: PolyRing
    lo: int
    hi: int
    ranks: Tuple[int, ...]
    diffs: Dict[int, PolyMatrix]

    def __post_init__(self):
        if self.hi < self.lo:
            raise ShapeMismatch("empty degree window; use equal lo/hi with rank 0 instead")
        if len(self.ranks) != self.hi - self.lo + 1:
            raise ShapeMismatch("rank list does not match the degree window")
        for i, mat in self.diffs.items():
            if mat.nrows != self.rank(i + 1) or mat.ncols != self.rank(i):
                raise ShapeMismatch(f"differential at degree {i} has the wrong shape")
        for i in range(self.lo, self.hi + 1):
            square = self.diff_at(i + 1) * self.diff_at(i)
            if not square.is_zero():
                raise ShapeMismatch(f"differential does not square to zero at degree {i}")

    def rank(self, degree: int) -> int:
        if self.lo <= degree <= self.hi:
            return self.ranks[degree - self.lo]
        return 0

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def diff_at(self, degree: int) -> PolyMatrix:
        found = self.diffs.get(degree)
        if found is not None:
            return found
        return zeros(self.ring, self.rank(degree + 1), self.rank(degree))

    def total_rank(self) -> int:
        return sum(self.ranks)


def zero_complex(ring: PolyRing) -> FiniteComplex:
    return FiniteComplex(ring, 0, 0, (0,), {})


@dataclass(frozen=True)
class GradedMap:
    """Graded map of a fixed degree between finite complexes.

    blocks[i] is the component from source degree i to target degree
    i + degree; missing blocks are zero.
    """

    source: FiniteComplex
    target: FiniteComplex
    degree: int
    blocks: Dict[int, PolyMatrix]

    def __post_init__(self):
        for i, mat in self.blocks.items():
            want_rows = self.target.rank(i + self.degree)
            want_cols = self.source.rank(i)
            if (mat.nrows, mat.ncols) != (want_rows, want_cols):
                raise ShapeMismatch(
                    f"block at degree {i} is {mat.nrows}x{mat.ncols}, "
                    f"expected {want_rows}x{want_cols}"
                )

    def block(self, degree: int) -> PolyMatrix:
        found = self.blocks.get(degree)
        if found is not None:
            return found
        return zeros(
            self.source.ring,
            self.target.rank(degree + self.degree),
            self.source.rank(degree),
        )

    def compose(self, inner: "GradedMap") -> "GradedMap":
        """self after inner (inner applies first)."""
        if inner.target is not self.source and inner.target != self.source:
            raise ShapeMismatch("composition through mismatched complexes")
        blocks = {}
        for i in inner.source.degrees():
            mat = self.block(i + inner.degree) * inner.block(i)
            if not mat.is_zero():
                blocks[i] = mat
        return GradedMap(inner.source, self.target, self.degree + inner.degree, blocks)

    def add(self, other: "GradedMap") -> "GradedMap":
        if self.degree != other.degree:
            raise ShapeMismatch("cannot add graded maps of different degrees")
        blocks = {}
        for i in self.source.degrees():
            mat = self.block(i) + other.block(i)
            if not mat.is_zero():
                blocks[i] = mat
        return GradedMap(self.source, self.target, self.degree, blocks)

    def sub(self, other: "GradedMap") -> "GradedMap":
        return self.add(other.scale(-1))

    def scale(self, scalar) -> "GradedMap":
        return GradedMap(
            self.source,
            self.target,
            self.degree,
            {i: m.scale(scalar) for i, m in self.blocks.items()},
        )

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.blocks.values())

    def equals(self, other: "GradedMap") -> bool:
        if self.degree != other.degree:
            return False
        for i in set(self.blocks) | set(other.blocks):
            if not (self.block(i) - other.block(i)).is_zero():
                return False
        return True


def identity_map(cx: FiniteComplex) -> GradedMap:
    blocks = {
        i: identity(cx.ring, cx.rank(i)) for i in cx.degrees() if cx.rank(i) > 0
    }
    return GradedMap(cx, cx, 0, blocks)


def differential_map(cx: FiniteComplex) -> GradedMap:
    return GradedMap(cx, cx, 1, dict(cx.diffs))


def is_chain_map(f: GradedMap) -> bool:
    """b_target f = f b_source, exactly (degree-zero maps)."""
    left = differential_map(f.target).compose(f)
    right = f.compose(differential_map(f.source))
    return left.equals(right)


@dataclass(frozen=True)
class DeformationRetractDatum:
    """(iota, p, h): chain maps L -> M -> L and a degree -1 homotopy on M."""

    small: FiniteComplex
    big: FiniteComplex
    iota: GradedMap
    p: GradedMap
    h: GradedMap

    def __post_init__(self):
        if self.iota.degree != 0 or self.p.degree != 0 or self.h.degree != -1:
            raise ShapeMismatch("deformation retract maps have the wrong degrees")


def verify_drd(datum: DeformationRetractDatum) -> bool:
    """Check all defining identities exactly.

    Returns True iff iota and p are chain maps, p iota = 1 on the small
    complex, and iota p = 1 + bh + hb on the big complex.
    """
    if not is_chain_map(datum.iota) or not is_chain_map(datum.p):
        return False
    one_small = identity_map(datum.small)
    if not datum.p.compose(datum.iota).equals(one_small):
        return False
    b = differential_map(datum.big)
    rhs = identity_map(datum.big).add(b.compose(datum.h)).add(datum.h.compose(b))
    return datum.iota.compose(datum.p).equals(rhs)


def perturb_drd(
    datum: DeformationRetractDatum,
    mu: GradedMap,
    bound: int | None = None,
) -> DeformationRetractDatum:
    """Transfer the retract across the perturbed differential b + mu.

    Hypotheses, all checked exactly: (b + mu)^2 = 0, p h = 0, p mu = 0,
    and (mu h)^k = 0 for some k <= bound (default: total rank of the big
    complex).  Raises HypothesisViolated or NotSmall otherwise.  The
    returned datum has big differential b + mu, transferred iota and h,
    and the same p and small complex; it passes verify_drd.
    """
    big = datum.big
    if mu.degree != 1:
        raise ShapeMismatch("perturbation must raise degree by one")
    if bound is None:
        bound = max(big.total_rank(), 1)

    b = differential_map(big)
    b_new = b.add(mu)
    if not b_new.compose(b_new).is_zero():
        raise HypothesisViolated("(b + mu)^2 != 0")
    if not datum.p.compose(datum.h).is_zero():
        raise HypothesisViolated("p h != 0")
    if not datum.p.compose(mu).is_zero():
        raise HypothesisViolated("p mu != 0")

    mu_h = mu.compose(datum.h)
    powers = [mu]  # (mu h)^k mu for k = 0, 1, ...
    current = mu
    nilpotent = mu_h.is_zero()
    for _ in range(bound):
        current = mu_h.compose(current)
        if current.is_zero():
            nilpotent = True
            break
        powers.append(current)
    if not nilpotent and not current.is_zero():
        raise NotSmall(
            f"(mu h)^k mu still nonzero after {bound} iterations; "
            "the perturbation is not small at this bound"
        )

    series = powers[0]
    for term in powers[1:]:
        series = series.add(term)  # A = (1 - mu h)^{-1} mu

    iota_new = datum.iota.add(datum.h.compose(series).compose(datum.iota))
    h_new = datum.h.add(datum.h.compose(series).compose(datum.h))

    perturbed_big = FiniteComplex(
        big.ring,
        big.lo,
        big.hi,
        big.ranks,
        {i: b_new.block(i) for i in big.degrees() if not b_new.block(i).is_zero()},
    )
    return DeformationRetractDatum(
        small=datum.small,
        big=perturbed_big,
        iota=_rehome(iota_new, datum.small, perturbed_big),
        p=_rehome(datum.p, perturbed_big, datum.small),
        h=_rehome(h_new, perturbed_big, perturbed_big),
    )


def _rehome(f: GradedMap, source: FiniteComplex, target: FiniteComplex) -> GradedMap:
    """Reattach a graded map to complexes with identical underlying ranks."""
    return GradedMap(source, target, f.degree, dict(f.blocks))
