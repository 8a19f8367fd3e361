"""Command-line front end.

Commands: validate, jacobi, residue, trace, pair, pretrace, ext, gram,
bulk, selfcheck.  Results are JSON documents on standard output with a
versioned schema; rationals serialize as "p/q" strings, never floats.
Exit codes: 0 success, 2 validation failure, 3 computation failure,
4 usage error.  Commands that draw random parameter matrices require an
explicit seed (flag or manifest); there is no default seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import __version__
from .errors import (
    ManifestError,
    MFResError,
    NoStabilization,
    NotSmall,
    NotZeroDimensional,
    ParseError,
    SearchExhausted,
    ShapeMismatch,
)
from .manifest import Manifest, load_manifest
from .mf import EVEN, ODD, random_sop
from .pairing import (
    boundary_bulk,
    gram_matrix,
    jacobi_algebra,
    kl_pair,
    kl_trace,
    pretrace,
)
from .poly import Polynomial
from .residues import residue_symbol
from .selfcheck import run_selfcheck

RESULT_SCHEMA = "mfres-result/1"

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_COMPUTATION = 3
EXIT_USAGE = 4

_COMPUTATION_ERRORS = (NoStabilization, SearchExhausted, NotSmall, NotZeroDimensional)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit with code 4
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _fmt(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


def _fmt_matrix(rows: Sequence[Sequence[Fraction]]) -> List[List[str]]:
    return [[_fmt(Fraction(v)) for v in row] for row in rows]


def _document(command: str, inputs: Dict, outputs: Dict, provenance: Optional[Dict] = None) -> Dict:
    doc = {
        "schema": RESULT_SCHEMA,
        "version": __version__,
        "command": command,
        "inputs": inputs,
        "outputs": outputs,
    }
    if provenance is not None:
        doc["provenance"] = provenance
    return doc


def _need_object(manifest: Manifest, name: Optional[str], parser: _Parser):
    if name is None:
        parser.error("--object NAME is required for this command")
    found = manifest.objects.get(name)
    if found is None:
        parser.error(f"unknown object {name!r}")
    return found


def _need_morphism(manifest: Manifest, name: Optional[str], parser: _Parser, flag="--morphism"):
    if name is None:
        parser.error(f"{flag} NAME is required for this command")
    found = manifest.morphisms.get(name)
    if found is None:
        parser.error(f"unknown morphism {name!r}")
    return found


def _need_seed(args, manifest: Manifest, parser: _Parser) -> int:
    if args.seed is not None:
        return args.seed
    if "sop" in manifest.seeds:
        return manifest.seeds["sop"]
    parser.error("this command draws random parameters: pass --seed N "
                 "(or put \"seeds\": {\"sop\": N} in the manifest)")


def _truncation(args, manifest: Manifest) -> Optional[int]:
    if args.truncation is not None:
        return args.truncation
    return manifest.bounds.get("truncation")


def build_parser() -> _Parser:
    parser = _Parser(prog="mfres", description=__doc__)
    parser.add_argument("command", choices=[
        "validate", "jacobi", "residue", "trace", "pair", "pretrace",
        "ext", "gram", "bulk", "selfcheck",
    ])
    parser.add_argument("--manifest", required=True, help="path to the manifest JSON")
    parser.add_argument("--object", help="object name, for ext/gram")
    parser.add_argument("--morphism", help="morphism name")
    parser.add_argument("--morphism2", help="second morphism name, for pair")
    parser.add_argument("--seed", type=int, help="seed for random parameter search")
    parser.add_argument("--truncation", type=int, help="maximum Ext truncation degree")
    parser.add_argument("--attempts", type=int, help="parameter search attempts")
    parser.add_argument("--rounds", type=int, default=4, help="selfcheck rounds per property")
    parser.add_argument("--numerator", help="numerator expression, for residue")
    parser.add_argument("--denominators",
                        help="comma-separated denominator expressions, for residue "
                             "(default: the partial derivatives of the potential)")
    style = parser.add_mutually_exclusive_group()
    style.add_argument("--json", action="store_true", help="compact JSON output (default)")
    style.add_argument("--pretty", action="store_true", help="indented JSON output")
    return parser


def _cmd_validate(args, manifest: Manifest, parser) -> Dict:
    # load_manifest already validated everything; report what it accepted.
    outputs = {
        "potential": str(manifest.potential),
        "objects": {name: "ok" for name in sorted(manifest.objects)},
        "morphisms": {name: "ok" for name in sorted(manifest.morphisms)},
    }
    return _document("validate", {"manifest": args.manifest}, outputs)


def _cmd_jacobi(args, manifest: Manifest, parser) -> Dict:
    algebra = jacobi_algebra(manifest.potential)
    ring = manifest.ring
    basis = [str(ring.monomial(m)) for m in algebra.quotient.monomials]
    outputs = {
        "milnor": algebra.milnor,
        "basis": basis,
        "gamma": {
            str(ring.monomial(m)): _fmt(v) for m, v in sorted(algebra.gamma.items())
        },
        "gram": _fmt_matrix(algebra.gram),
        "rank": algebra.rank,
        "frobenius": algebra.is_frobenius,
    }
    return _document("jacobi", {"manifest": args.manifest}, outputs)


def _cmd_residue(args, manifest: Manifest, parser) -> Dict:
    if args.numerator is None:
        parser.error("--numerator EXPR is required for residue")
    ring = manifest.ring
    try:
        numerator = ring.parse(args.numerator)
        if args.denominators:
            denominators = [ring.parse(text) for text in args.denominators.split(",")]
        else:
            denominators = [manifest.potential.diff(i) for i in range(ring.n)]
    except ParseError as exc:
        parser.error(str(exc))
    value = residue_symbol(numerator, denominators)
    outputs = {
        "numerator": str(numerator),
        "denominators": [str(t) for t in denominators],
        "value": _fmt(value),
    }
    return _document("residue", {"manifest": args.manifest}, outputs)


def _cmd_trace(args, manifest: Manifest, parser) -> Dict:
    morphism = _need_morphism(manifest, args.morphism, parser)
    value = kl_trace(morphism)
    return _document(
        "trace",
        {"manifest": args.manifest, "morphism": args.morphism},
        {"value": _fmt(value)},
    )


def _cmd_pair(args, manifest: Manifest, parser) -> Dict:
    psi = _need_morphism(manifest, args.morphism, parser)
    phi = _need_morphism(manifest, args.morphism2, parser, flag="--morphism2")
    value = kl_pair(psi, phi)
    return _document(
        "pair",
        {"manifest": args.manifest, "morphism": args.morphism, "morphism2": args.morphism2},
        {"value": _fmt(value)},
    )


def _cmd_pretrace(args, manifest: Manifest, parser) -> Dict:
    morphism = _need_morphism(manifest, args.morphism, parser)
    seed = _need_seed(args, manifest, parser)
    attempts = args.attempts or manifest.bounds.get("sop_attempts", 200)
    c_matrix = random_sop(manifest.potential, seed, attempts=attempts)
    result = pretrace(morphism, c_matrix)
    outputs = {
        "scalar": _fmt(result.scalar),
        "fraction": {
            "numerator": str(result.fraction.numerator),
            "denominators": [str(t) for t in result.fraction.denominators],
        },
        "is_zero": result.fraction.is_zero(),
    }
    provenance = {
        "seed": seed,
        "c_matrix": _fmt_matrix(result.c_matrix),
        "parameters": [str(t) for t in result.parameters],
    }
    return _document(
        "pretrace",
        {"manifest": args.manifest, "morphism": args.morphism},
        outputs,
        provenance,
    )


def _cmd_ext(args, manifest: Manifest, parser) -> Dict:
    from .mf import ext_basis

    mf = _need_object(manifest, args.object, parser)
    limit = _truncation(args, manifest)
    outputs = {}
    for parity, label in ((EVEN, "even"), (ODD, "odd")):
        basis = ext_basis(mf, mf, parity, max_truncation=limit)
        outputs[label] = {
            "dimension": basis.dimension,
            "truncation": basis.truncation_degree,
            "representatives": [
                {
                    "blocks": [
                        [[str(e) for e in row] for row in rep.b0.entries],
                        [[str(e) for e in row] for row in rep.b1.entries],
                    ]
                }
                for rep in basis.representatives
            ],
        }
    provenance = {"truncation_limit": limit}
    return _document("ext", {"manifest": args.manifest, "object": args.object}, outputs, provenance)


def _cmd_gram(args, manifest: Manifest, parser) -> Dict:
    mf = _need_object(manifest, args.object, parser)
    limit = _truncation(args, manifest)
    outputs = {}
    for parity, label in ((EVEN, "even"), (ODD, "odd")):
        block = gram_matrix(mf, mf, parity, max_truncation=limit)
        outputs[label] = {
            "dimensions": list(block.dimensions),
            "matrix": _fmt_matrix(block.entries),
            "rank": block.rank,
            "nondegenerate": block.nondegenerate,
        }
    provenance = {"truncation_limit": limit}
    return _document("gram", {"manifest": args.manifest, "object": args.object}, outputs, provenance)


def _cmd_bulk(args, manifest: Manifest, parser) -> Dict:
    morphism = _need_morphism(manifest, args.morphism, parser)
    algebra = jacobi_algebra(manifest.potential)
    image = boundary_bulk(morphism)
    outputs = {
        "class": str(image),
        "gamma": _fmt(algebra.gamma_value(image)),
        "trace": _fmt(kl_trace(morphism)),
    }
    return _document(
        "bulk",
        {"manifest": args.manifest, "morphism": args.morphism},
        outputs,
    )


def _cmd_selfcheck(args, manifest: Manifest, parser) -> Dict:
    seed = _need_seed(args, manifest, parser)
    limit = _truncation(args, manifest)
    results = run_selfcheck(manifest, seed, rounds=args.rounds, max_truncation=limit)
    outputs = {
        "checks": [
            {"name": r.name, "passed": r.passed, "detail": r.detail} for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    provenance = {"seed": seed, "rounds": args.rounds}
    return _document("selfcheck", {"manifest": args.manifest}, outputs, provenance)


_COMMANDS = {
    "validate": _cmd_validate,
    "jacobi": _cmd_jacobi,
    "residue": _cmd_residue,
    "trace": _cmd_trace,
    "pair": _cmd_pair,
    "pretrace": _cmd_pretrace,
    "ext": _cmd_ext,
    "gram": _cmd_gram,
    "bulk": _cmd_bulk,
    "selfcheck": _cmd_selfcheck,
}


def _error_document(command: str, exc: Exception) -> Dict:
    return {
        "schema": RESULT_SCHEMA,
        "version": __version__,
        "command": command,
        "error": {"type": type(exc).__name__, "message": str(exc)},
    }


def _emit(doc: Dict, pretty: bool) -> None:
    if pretty:
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        print(json.dumps(doc, sort_keys=True, separators=(",", ":")))


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        manifest = load_manifest(args.manifest)
    except ManifestError as exc:
        _emit(_error_document(args.command, exc), args.pretty)
        return EXIT_VALIDATION
    try:
        doc = _COMMANDS[args.command](args, manifest, parser)
    except _COMPUTATION_ERRORS as exc:
        _emit(_error_document(args.command, exc), args.pretty)
        return EXIT_COMPUTATION
    except (ParseError, ShapeMismatch, ManifestError) as exc:
        _emit(_error_document(args.command, exc), args.pretty)
        return EXIT_VALIDATION
    _emit(doc, args.pretty)
    if args.command == "selfcheck" and not doc["outputs"]["all_passed"]:
        return EXIT_COMPUTATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
