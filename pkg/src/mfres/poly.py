"""Exact sparse multivariate polynomials over the rationals.

A polynomial is a map from monomials to nonzero rational coefficients,

  terms : Dict[Monomial, Fraction],    Monomial = Tuple[int, ...]

with one exponent per ring variable.  The zero polynomial has an empty
term map.  All arithmetic is exact; there is no floating point anywhere
in this package.

Monomials are ordered by graded reverse lexicographic order with the
first ring variable largest.  The order only matters for leading terms
(division, Groebner bases) and for printing; the term map itself is
unordered.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

from .errors import AmbientMismatch, ParseError

Monomial = Tuple[int, ...]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


def grevlex_key(mono: Monomial) -> tuple:
    """Sort key realizing graded reverse lexicographic order (ascending)."""
    return (sum(mono), tuple(-e for e in reversed(mono)))


def monomial_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def monomial_divides(a: Monomial, b: Monomial) -> bool:
    """True iff monomial a divides monomial b."""
    return all(x <= y for x, y in zip(a, b))


def monomial_div(a: Monomial, b: Monomial) -> Monomial:
    """The quotient monomial a / b; caller guarantees divisibility."""
    return tuple(x - y for x, y in zip(a, b))


def monomial_lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def monomial_degree(mono: Monomial) -> int:
    return sum(mono)


@dataclass(frozen=True)
class PolyRing:
    """Ambient polynomial ring: an ordered tuple of variable names."""

    variables: Tuple[str, ...]

    def __post_init__(self):
        if not self.variables:
            raise ValueError("a ring needs at least one variable")
        seen = set()
        for name in self.variables:
            if not _NAME_RE.fullmatch(name):
                raise ValueError(f"invalid variable name {name!r}")
            if name in seen:
                raise ValueError(f"duplicate variable name {name!r}")
            seen.add(name)

    @property
    def n(self) -> int:
        return len(self.variables)

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, value) -> "Polynomial":
        return Polynomial(self, {(0,) * self.n: Fraction(value)})

    def var(self, index: int) -> "Polynomial":
        if not 0 <= index < self.n:
            raise IndexError(f"variable index {index} out of range")
        exps = [0] * self.n
        exps[index] = 1
        return Polynomial(self, {tuple(exps): Fraction(1)})

    def monomial(self, exponents: Sequence[int], coeff=1) -> "Polynomial":
        exps = tuple(int(e) for e in exponents)
        if len(exps) != self.n or any(e < 0 for e in exps):
            raise ValueError(f"bad exponent vector {exponents!r}")
        return Polynomial(self, {exps: Fraction(coeff)})

    def parse(self, text: str) -> "Polynomial":
        return parse_poly(text, self)


class Polynomial:
    """Immutable sparse polynomial with exact rational coefficients."""

    __slots__ = ("ring", "_terms", "_hash")

    def __init__(self, ring: PolyRing, terms: Dict[Monomial, Fraction]):
        self.ring = ring
        self._terms = {m: c for m, c in terms.items() if c != 0}
        self._hash = None

    # -- structure ---------------------------------------------------------

    @property
    def terms(self) -> Dict[Monomial, Fraction]:
        """The term map; treat as read-only."""
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(m) for m in self._terms)

    def coefficient(self, mono: Monomial) -> Fraction:
        """The coefficient of the given monomial, 0 if absent."""
        if len(mono) != self.ring.n:
            raise AmbientMismatch("monomial length does not match the ring")
        return self._terms.get(tuple(mono), Fraction(0))

    def constant_term(self) -> Fraction:
        return self._terms.get((0,) * self.ring.n, Fraction(0))

    def leading_monomial(self) -> Monomial:
        if not self._terms:
            raise ValueError("the zero polynomial has no leading term")
        return max(self._terms, key=grevlex_key)

    def leading_coefficient(self) -> Fraction:
        return self._terms[self.leading_monomial()]

    def sorted_terms(self, reverse: bool = True) -> List[Tuple[Monomial, Fraction]]:
        return [(m, self._terms[m]) for m in sorted(self._terms, key=grevlex_key, reverse=reverse)]

    def key(self) -> tuple:
        """Canonical hashable form, used for caching."""
        return tuple(sorted(self._terms.items()))

    # -- arithmetic --------------------------------------------------------

    def _check(self, other: "Polynomial") -> None:
        if self.ring != other.ring:
            raise AmbientMismatch(
                f"rings differ: {self.ring.variables} vs {other.ring.variables}"
            )

    def __add__(self, other):
        other = self._coerce(other)
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Polynomial(self.ring, out)

    def __sub__(self, other):
        other = self._coerce(other)
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            out[m] = out.get(m, Fraction(0)) - c
        return Polynomial(self.ring, out)

    def __neg__(self):
        return Polynomial(self.ring, {m: -c for m, c in self._terms.items()})

    def __mul__(self, other):
        other = self._coerce(other)
        self._check(other)
        if not self._terms or not other._terms:
            return self.ring.zero()
        out: Dict[Monomial, Fraction] = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = monomial_mul(ma, mb)
                out[m] = out.get(m, Fraction(0)) + ca * cb
        return Polynomial(self.ring, out)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __radd__(self, other):
        return self.__add__(other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("negative exponent")
        out = self.ring.one()
        base = self
        e = exponent
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def scale(self, scalar) -> "Polynomial":
        c = Fraction(scalar)
        return Polynomial(self.ring, {m: c * v for m, v in self._terms.items()})

    def mul_monomial(self, mono: Monomial, coeff: Fraction) -> "Polynomial":
        if coeff == 0:
            return self.ring.zero()
        return Polynomial(
            self.ring, {monomial_mul(m, mono): c * coeff for m, c in self._terms.items()}
        )

    def diff(self, index: int) -> "Polynomial":
        """Formal partial derivative with respect to the index-th variable."""
        if not 0 <= index < self.ring.n:
            raise IndexError(f"variable index {index} out of range")
        out: Dict[Monomial, Fraction] = {}
        for m, c in self._terms.items():
            e = m[index]
            if e == 0:
                continue
            new = list(m)
            new[index] = e - 1
            out[tuple(new)] = c * e
        return Polynomial(self.ring, out)

    # -- comparison and display --------------------------------------------

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.ring == other.ring and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.key()))
        return self._hash

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for mono, coeff in self.sorted_terms():
            factors = []
            for name, e in zip(self.ring.variables, mono):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append(f"{name}^{e}")
            body = "*".join(factors)
            mag = abs(coeff)
            if not body:
                piece = _format_fraction(mag)
            elif mag == 1:
                piece = body
            else:
                piece = f"{_format_fraction(mag)}*{body}"
            parts.append(("-" if coeff < 0 else "+", piece))
        sign, piece = parts[0]
        out = ("-" if sign == "-" else "") + piece
        for sign, piece in parts[1:]:
            out += f" {sign} {piece}"
        return out

    def __repr__(self):
        return f"Polynomial({self})"


def _format_fraction(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# -- parsing ----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*^/()]))"
)


def _tokenize(text: str) -> List[Tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            stripped = text[pos:].lstrip()
            bad = len(text) - len(stripped)
            raise ParseError(f"unexpected character {text[bad]!r}", bad)
        if match.lastgroup == "num":
            tokens.append(("num", match.group("num"), match.start("num")))
        elif match.lastgroup == "name":
            tokens.append(("name", match.group("name"), match.start("name")))
        else:
            tokens.append(("op", match.group("op"), match.start("op")))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    """Recursive descent over: expr = term (+- term)*, term = factor (* factor)*,
    factor = '-' factor | atom, atom = base ('^' int)*, base = number | name | (expr).

    '^' binds tightest; '/' only forms rational literals between integers.
    """

    def __init__(self, text: str, ring: PolyRing):
        self.tokens = _tokenize(text)
        self.index = 0
        self.ring = ring

    def peek(self):
        return self.tokens[self.index]

    def advance(self):
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def expect_op(self, op: str):
        kind, value, pos = self.peek()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", pos)
        return self.advance()

    def parse(self) -> Polynomial:
        result = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected token {value!r}", pos)
        return result

    def expr(self) -> Polynomial:
        result = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.advance()
                rhs = self.term()
                result = result + rhs if value == "+" else result - rhs
            else:
                return result

    def term(self) -> Polynomial:
        result = self.factor()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "*":
                self.advance()
                result = result * self.factor()
            else:
                return result

    def factor(self) -> Polynomial:
        kind, value, _ = self.peek()
        if kind == "op" and value == "-":
            self.advance()
            return -self.factor()
        return self.atom()

    def atom(self) -> Polynomial:
        result = self.base()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == "^":
                self.advance()
                kind, value, pos = self.advance()
                if kind != "num":
                    raise ParseError("exponent must be a non-negative integer", pos)
                result = result ** int(value)
            else:
                return result

    def base(self) -> Polynomial:
        kind, value, pos = self.advance()
        if kind == "num":
            numerator = int(value)
            kind2, value2, _ = self.peek()
            if kind2 == "op" and value2 == "/":
                self.advance()
                kind3, value3, pos3 = self.advance()
                if kind3 != "num":
                    raise ParseError("denominator must be an integer", pos3)
                if int(value3) == 0:
                    raise ParseError("zero denominator", pos3)
                return self.ring.const(Fraction(numerator, int(value3)))
            return self.ring.const(numerator)
        if kind == "name":
            if value not in self.ring.variables:
                raise ParseError(f"unknown variable {value!r}", pos)
            return self.ring.var(self.ring.variables.index(value))
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        raise ParseError(f"unexpected token {value!r}" if value else "unexpected end of input", pos)


def parse_poly(text: str, ring: PolyRing) -> Polynomial:
    """Parse an expression string into its expanded normal form.

    Grammar: integers, rationals "p/q", variable identifiers, `+ - * ^`,
    parentheses; `^` binds tightest; unary minus allowed; whitespace
    ignored.  Raises ParseError with a position on syntax errors and on
    unknown variable names.
    """
    return _Parser(text, ring).parse()
