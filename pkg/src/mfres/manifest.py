"""Manifest files: named objects and morphisms in a JSON document.

Polynomials are expression strings, matrices row-major nested arrays of
expression strings.  Every object is validated at load time; every
morphism is shape-checked and, unless marked "closed": false, checked
to commute with the differentials.  Errors name the offending entry and
the identity that failed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .errors import ManifestError, ParseError
from .matrices import PolyMatrix, matrix
from .mf import EVEN, ODD, MatrixFactorisation, MFMorphism, validate_mf
from .poly import Polynomial, PolyRing

SCHEMA = "mfres-manifest/1"


@dataclass
class Manifest:
    path: str
    ring: PolyRing
    potential: Polynomial
    objects: Dict[str, MatrixFactorisation]
    morphisms: Dict[str, MFMorphism]
    seeds: Dict[str, int] = field(default_factory=dict)
    bounds: Dict[str, int] = field(default_factory=dict)


def _parse_entry(ring: PolyRing, text, where: str) -> Polynomial:
    if not isinstance(text, str):
        raise ManifestError(f"{where}: expected an expression string, got {text!r}")
    try:
        return ring.parse(text)
    except ParseError as exc:
        raise ManifestError(f"{where}: {exc}") from exc


def _parse_matrix(ring: PolyRing, data, where: str) -> PolyMatrix:
    if not isinstance(data, list) or not all(isinstance(row, list) for row in data):
        raise ManifestError(f"{where}: expected a nested array of expression strings")
    if not data:
        raise ManifestError(f"{where}: empty matrix")
    width = len(data[0])
    rows = []
    for i, row in enumerate(data):
        if len(row) != width:
            raise ManifestError(f"{where}: ragged rows")
        rows.append([_parse_entry(ring, cell, f"{where}[{i}][{j}]") for j, cell in enumerate(row)])
    return matrix(ring, rows)


def load_manifest(path: str) -> Manifest:
    """Load and validate a manifest; raises ManifestError on any defect."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except FileNotFoundError as exc:
        raise ManifestError(f"manifest not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ManifestError(
            f"manifest {path} is not valid JSON: {exc.msg} "
            f"(line {exc.lineno}, column {exc.colno})"
        ) from exc

    if not isinstance(raw, dict):
        raise ManifestError("manifest root must be an object")
    for key in ("ring", "potential"):
        if key not in raw:
            raise ManifestError(f"manifest is missing the {key!r} field")

    names = raw["ring"]
    if not isinstance(names, list) or not all(isinstance(v, str) for v in names):
        raise ManifestError("'ring' must be a list of variable names")
    try:
        ring = PolyRing(tuple(names))
    except ValueError as exc:
        raise ManifestError(str(exc)) from exc
    potential = _parse_entry(ring, raw["potential"], "potential")

    objects: Dict[str, MatrixFactorisation] = {}
    for name, spec in (raw.get("objects") or {}).items():
        if not isinstance(spec, dict) or "d0" not in spec or "d1" not in spec:
            raise ManifestError(f"object {name!r} needs 'd0' and 'd1' matrices")
        d0 = _parse_matrix(ring, spec["d0"], f"objects.{name}.d0")
        d1 = _parse_matrix(ring, spec["d1"], f"objects.{name}.d1")
        mf = MatrixFactorisation(ring, potential, d0, d1)
        if not validate_mf(mf):
            raise ManifestError(
                f"object {name!r} is not a matrix factorisation of the potential: "
                "d1*d0 or d0*d1 differs from W times the identity"
            )
        objects[name] = mf

    morphisms: Dict[str, MFMorphism] = {}
    for name, spec in (raw.get("morphisms") or {}).items():
        if not isinstance(spec, dict):
            raise ManifestError(f"morphism {name!r} must be an object")
        for key in ("source", "target", "parity", "blocks"):
            if key not in spec:
                raise ManifestError(f"morphism {name!r} is missing {key!r}")
        source = objects.get(spec["source"])
        target = objects.get(spec["target"])
        if source is None or target is None:
            raise ManifestError(
                f"morphism {name!r} references an unknown object "
                f"({spec['source']!r} or {spec['target']!r})"
            )
        parity_name = spec["parity"]
        if parity_name not in ("even", "odd"):
            raise ManifestError(f"morphism {name!r}: parity must be 'even' or 'odd'")
        parity = EVEN if parity_name == "even" else ODD
        blocks = spec["blocks"]
        if not isinstance(blocks, list) or len(blocks) != 2:
            raise ManifestError(f"morphism {name!r}: 'blocks' must hold two matrices")
        b0 = _parse_matrix(ring, blocks[0], f"morphisms.{name}.blocks[0]")
        b1 = _parse_matrix(ring, blocks[1], f"morphisms.{name}.blocks[1]")
        try:
            morphism = MFMorphism(source, target, parity, b0, b1)
        except Exception as exc:
            raise ManifestError(f"morphism {name!r}: {exc}") from exc
        if spec.get("closed", True) and not morphism.is_closed():
            raise ManifestError(
                f"morphism {name!r} does not commute with the differentials "
                "(declare \"closed\": false to load it anyway)"
            )
        morphisms[name] = morphism

    seeds = raw.get("seeds") or {}
    bounds = raw.get("bounds") or {}
    for label, table in (("seeds", seeds), ("bounds", bounds)):
        if not isinstance(table, dict) or not all(
            isinstance(v, int) for v in table.values()
        ):
            raise ManifestError(f"'{label}' must map names to integers")

    return Manifest(path, ring, potential, objects, morphisms, dict(seeds), dict(bounds))
