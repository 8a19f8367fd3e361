"""Randomized invariant suite over the objects of a manifest.

Each check exercises one exact identity of the pairing machinery on
randomized inputs: graded cyclicity, the shift sign, degree
independence of the block traces, independence of the parameter matrix
and of the null-homotopies, the permutation sign of the parameter
factors, agreement of the fraction route with the trace formula,
factorization through the Jacobi algebra, and vanishing on
null-homotopic morphisms.  All arithmetic is exact, so a single
counterexample is a hard failure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

from .ideals import cached_groebner, in_ideal
from .manifest import Manifest
from .mf import (
    EVEN,
    ODD,
    MatrixFactorisation,
    MFMorphism,
    compose,
    ext_basis,
    hom_differential,
    random_sop,
    sop_parameters,
    transport_to_shift,
    zero_morphism,
)
from .pairing import (
    _lambda_homotopies,
    _pretrace_operator,
    boundary_bulk,
    jacobi_algebra,
    kl_trace,
    pretrace,
    pretrace_block_traces,
    pretrace_sign,
)
from .poly import Polynomial, PolyRing
from .residues import ResidueContext, fraction_equal, make_fraction, zeta


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _random_polynomial(rng: random.Random, ring: PolyRing, max_degree: int = 2) -> Polynomial:
    out = ring.zero()
    for _ in range(rng.randint(1, 3)):
        exps = [0] * ring.n
        budget = rng.randint(0, max_degree)
        for _ in range(budget):
            exps[rng.randrange(ring.n)] += 1
        coeff = rng.randint(-3, 3)
        if coeff:
            out = out + ring.monomial(exps, coeff)
    return out


def _random_morphism(
    rng: random.Random, mf: MatrixFactorisation, parity: int
) -> MFMorphism:
    template = zero_morphism(mf, mf, parity)

    def fill(block):
        rows = []
        for _ in range(block.nrows):
            rows.append([_random_polynomial(rng, mf.ring) for _ in range(block.ncols)])
        return rows

    from .matrices import matrix as build

    b0 = build(mf.ring, fill(template.b0), ncols=template.b0.ncols)
    b1 = build(mf.ring, fill(template.b1), ncols=template.b1.ncols)
    return MFMorphism(mf, mf, parity, b0, b1)


def _random_closed(
    rng: random.Random,
    mf: MatrixFactorisation,
    parity: int,
    reps: Sequence[MFMorphism],
) -> MFMorphism:
    out = zero_morphism(mf, mf, parity)
    for rep in reps:
        coeff = rng.randint(-2, 2)
        if coeff:
            out = out.add(rep.scale(coeff))
    boundary = hom_differential(_random_morphism(rng, mf, (parity + 1) % 2))
    return out.add(boundary)


class _Suite:
    def __init__(self, manifest: Manifest, seed: int, rounds: int, max_truncation=None):
        self.manifest = manifest
        self.rng = random.Random(seed)
        self.seed = seed
        self.rounds = rounds
        self.results: List[CheckResult] = []
        self.max_truncation = max_truncation
        self.ext: Dict[Tuple[str, int], Sequence[MFMorphism]] = {}
        for name, mf in manifest.objects.items():
            for parity in (EVEN, ODD):
                basis = ext_basis(mf, mf, parity, max_truncation=max_truncation)
                self.ext[(name, parity)] = basis.representatives

    def record(self, name: str, passed: bool, detail: str) -> None:
        self.results.append(CheckResult(name, passed, detail))

    def objects(self) -> Iterable[Tuple[str, MatrixFactorisation]]:
        return self.manifest.objects.items()

    # -- individual properties ------------------------------------------------

    def check_cyclicity(self) -> None:
        failures = []
        trials = 0
        for name, mf in self.objects():
            n = mf.ring.n
            for parity in (EVEN, ODD):
                other = (n - parity) % 2
                for _ in range(self.rounds):
                    psi = _random_closed(self.rng, mf, other, self.ext[(name, other)])
                    phi = _random_closed(self.rng, mf, parity, self.ext[(name, parity)])
                    sign = -1 if (psi.parity * phi.parity) % 2 else 1
                    trials += 1
                    if kl_trace(compose(psi, phi)) != sign * kl_trace(compose(phi, psi)):
                        failures.append(name)
        self.record(
            "cyclicity_sign",
            not failures,
            f"{trials} randomized pairs" + (f"; failed on {failures}" if failures else ""),
        )

    def check_shift_sign(self) -> None:
        failures = []
        trials = 0
        for name, mf in self.objects():
            n = mf.ring.n
            sign = -1 if (n - 1) % 2 else 1
            parity = n % 2
            for _ in range(self.rounds):
                alpha = _random_closed(self.rng, mf, parity, self.ext[(name, parity)])
                trials += 1
                if kl_trace(alpha) != sign * kl_trace(transport_to_shift(alpha)):
                    failures.append(name)
        self.record(
            "shift_sign",
            not failures,
            f"{trials} transported endomorphisms, sign (-1)^(n-1)"
            + (f"; failed on {failures}" if failures else ""),
        )

    def check_degree_independence(self) -> None:
        failures = []
        trials = 0
        for name, mf in self.objects():
            parity = mf.ring.n % 2
            c_matrix = random_sop(mf.potential, self.rng.randrange(1 << 30))
            for _ in range(max(self.rounds // 2, 1)):
                alpha = _random_closed(self.rng, mf, parity, self.ext[(name, parity)])
                tr0, tr1, params = pretrace_block_traces(alpha, c_matrix)
                gb = cached_groebner((mf.potential,) + params)
                trials += 1
                if not in_ideal(tr0 - tr1, gb):
                    failures.append(name)
        self.record(
            "degree_independence",
            not failures,
            f"{trials} block-trace comparisons modulo (W, t)"
            + (f"; failed on {failures}" if failures else ""),
        )

    def check_choice_independence(self) -> None:
        failures = []
        trials = 0
        for name, mf in self.objects():
            parity = mf.ring.n % 2
            seeds = [self.rng.randrange(1 << 30) for _ in range(2)]
            matrices = [random_sop(mf.potential, s) for s in seeds]
            for _ in range(max(self.rounds // 2, 1)):
                alpha = _random_closed(self.rng, mf, parity, self.ext[(name, parity)])
                reference = kl_trace(alpha)
                scalars = [pretrace(alpha, c).scalar for c in matrices]
                trials += 1
                if any(s != reference for s in scalars):
                    failures.append((name, "seed"))
                    continue
                # Perturb each null-homotopy by a boundary D(eta): still a
                # null-homotopy for the same parameter, same class.
                c_matrix = matrices[0]
                lambdas = _lambda_homotopies(mf, c_matrix)
                perturbed = [
                    lam.add(hom_differential(_random_morphism(self.rng, mf, EVEN)))
                    for lam in lambdas
                ]
                params = tuple(sop_parameters(mf.potential, c_matrix))
                ctx = ResidueContext(mf.ring, (mf.potential,))
                op = _pretrace_operator(alpha, perturbed)
                numerator = op.b0.trace().scale(pretrace_sign(len(params)))
                scalar = zeta(make_fraction(ctx, numerator, params))
                if scalar != reference:
                    failures.append((name, "lambda"))
        self.record(
            "choice_independence",
            not failures,
            f"{trials} scalars across parameter matrices and homotopy perturbations"
            + (f"; failed on {failures}" if failures else ""),
        )

    def check_permutation_sign(self) -> None:
        failures = []
        trials = 0
        for name, mf in self.objects():
            n = mf.ring.n
            if n < 2:
                continue
            parity = n % 2
            c_matrix = random_sop(mf.potential, self.rng.randrange(1 << 30))
            params = tuple(sop_parameters(mf.potential, c_matrix))
            lambdas = _lambda_homotopies(mf, c_matrix)
            d = len(params)
            ctx = ResidueContext(mf.ring, (mf.potential,))
            for _ in range(max(self.rounds // 2, 1)):
                alpha = _random_closed(self.rng, mf, parity, self.ext[(name, parity)])
                order = list(range(d))
                self.rng.shuffle(order)
                inversions = sum(
                    1 for a in range(d) for b in range(a + 1, d)
                    if order[a] > order[b]
                )
                sign = -1 if inversions % 2 else 1
                base = pretrace(alpha, c_matrix)
                # (a) permuted factors over the unpermuted parameters pick
                # up the sign of the permutation;
                op = _pretrace_operator(alpha, [lambdas[i] for i in order])
                numerator = op.b0.trace().scale(pretrace_sign(d) * sign)
                permuted_fraction = make_fraction(ctx, numerator, params)
                trials += 1
                if not fraction_equal(permuted_fraction, base.fraction):
                    failures.append((name, "factor sign"))
                    continue
                # (b) permuting homotopies and parameters together is just
                # another admissible choice: the class is unchanged.
                permuted_params = tuple(params[i] for i in order)
                numerator2 = op.b0.trace().scale(pretrace_sign(d))
                chosen_fraction = make_fraction(ctx, numerator2, permuted_params)
                if not fraction_equal(chosen_fraction, base.fraction):
                    failures.append((name, "permuted parameters"))
        self.record(
            "permutation_sign",
            not failures,
            f"{trials} permuted factor orders compared through fraction equality"
            + (f"; failed on {failures}" if failures else ""),
        )

    def check_formula_equivalence(self) -> None:
        failures = []
        trials = 0
        for name, mf in self.objects():
            parity = mf.ring.n % 2
            seeds = [self.rng.randrange(1 << 30) for _ in range(3)]
            for rep in self.ext[(name, parity)]:
                reference = kl_trace(rep)
                for seed in seeds:
                    c_matrix = random_sop(mf.potential, seed)
                    trials += 1
                    if pretrace(rep, c_matrix).scalar != reference:
                        failures.append(name)
        self.record(
            "formula_equivalence",
            not failures,
            f"{trials} pretrace scalars against the trace formula"
            + (f"; failed on {failures}" if failures else ""),
        )

    def check_factorization(self) -> None:
        failures = []
        trials = 0
        for name, mf in self.objects():
            algebra = jacobi_algebra(mf.potential)
            parity = mf.ring.n % 2
            for rep in self.ext[(name, parity)]:
                trials += 1
                if algebra.gamma_value(boundary_bulk(rep)) != kl_trace(rep):
                    failures.append(name)
            for _ in range(self.rounds):
                alpha = _random_closed(self.rng, mf, parity, self.ext[(name, parity)])
                trials += 1
                if algebra.gamma_value(boundary_bulk(alpha)) != kl_trace(alpha):
                    failures.append(name)
        self.record(
            "bulk_factorization",
            not failures,
            f"{trials} classes through the Jacobi algebra"
            + (f"; failed on {failures}" if failures else ""),
        )

    def check_homotopy_invariance(self) -> None:
        failures = []
        trials = 0
        for name, mf in self.objects():
            parity = mf.ring.n % 2
            c_matrix = random_sop(mf.potential, self.rng.randrange(1 << 30))
            for _ in range(self.rounds):
                boundary = hom_differential(
                    _random_morphism(self.rng, mf, (parity + 1) % 2)
                )
                trials += 1
                if kl_trace(boundary) != 0:
                    failures.append((name, "trace"))
                    continue
                if not pretrace(boundary, c_matrix).fraction.is_zero():
                    failures.append((name, "fraction"))
        self.record(
            "homotopy_invariance",
            not failures,
            f"{trials} null-homotopic morphisms"
            + (f"; failed on {failures}" if failures else ""),
        )


def run_selfcheck(
    manifest: Manifest,
    seed: int,
    rounds: int = 4,
    max_truncation: int | None = None,
) -> List[CheckResult]:
    """Run every invariant check; deterministic given manifest and seed."""
    suite = _Suite(manifest, seed, rounds, max_truncation)
    suite.check_cyclicity()
    suite.check_shift_sign()
    suite.check_degree_independence()
    suite.check_choice_independence()
    suite.check_permutation_sign()
    suite.check_formula_equivalence()
    suite.check_factorization()
    suite.check_homotopy_invariance()
    return suite.results
