"""Shared exception types."""

from __future__ import annotations


class MFResError(Exception):
    """Base class for all library errors."""


class AmbientMismatch(MFResError):
    """Operands live over different polynomial rings."""


class ShapeMismatch(MFResError):
    """Matrix or morphism shapes are incompatible."""


class ParseError(MFResError):
    """Expression syntax error, with the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NotZeroDimensional(MFResError):
    """The ideal does not cut out a finite-dimensional quotient.

    Signals a denominator system that is not primary for the maximal
    ideal, e.g. a potential whose singular locus is not isolated at the
    origin.
    """


class NotSmall(MFResError):
    """Perturbation is not nilpotent within the allowed bound."""


class HypothesisViolated(MFResError):
    """Perturbation lemma hypotheses fail exactly."""


class NoStabilization(MFResError):
    """Ext-space truncation did not stabilize before the degree bound."""


class SearchExhausted(MFResError):
    """Randomized parameter search gave up after the allowed attempts."""


class ManifestError(MFResError):
    """Manifest failed to parse or validate."""
