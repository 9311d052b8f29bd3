"""Exact Laurent-polynomial scalars with rational coefficients.

Every tensor component in the engine is a :class:`ScalarExpr`: a finite map
from signed integer exponent vectors (one entry per coordinate) to nonzero
:class:`fractions.Fraction` coefficients.  Zero is the empty map, so equality
testing is structural and exact.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence

__all__ = [
    "ScalarExpr",
    "SymexprError",
    "ExprSyntaxError",
    "NonMonomialDivision",
    "UnknownCoordinate",
    "InadmissiblePoint",
    "ExponentOverflow",
    "parse_expr",
    "add",
    "mul",
    "neg",
    "pow_int",
    "partial_diff",
    "eval_at",
    "is_zero",
]

MAX_EXPONENT = 10_000


class SymexprError(ValueError):
    pass


class ExprSyntaxError(SymexprError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos} in {text!r}")
        self.text = text
        self.pos = pos


class NonMonomialDivision(SymexprError):
    pass


class UnknownCoordinate(SymexprError):
    pass


class InadmissiblePoint(SymexprError):
    pass


class ExponentOverflow(ArithmeticError):
    pass


def _check_exponents(exps: tuple[int, ...]) -> tuple[int, ...]:
    for e in exps:
        if abs(e) > MAX_EXPONENT:
            raise ExponentOverflow(f"exponent {e} exceeds bound {MAX_EXPONENT}")
    return exps


class ScalarExpr:
    """Immutable Laurent polynomial in a fixed, ordered tuple of coordinates."""

    __slots__ = ("coords", "_terms", "_hash")

    def __init__(self, coords: Sequence[str], terms: Mapping[tuple[int, ...], object] | None = None):
        self.coords = tuple(coords)
        clean: dict[tuple[int, ...], Fraction] = {}
        for exps, c in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != len(self.coords):
                raise SymexprError(f"exponent vector {exps} does not match coordinates {self.coords}")
            c = Fraction(c)
            if c:
                clean[_check_exponents(exps)] = clean.get(exps, Fraction(0)) + c
        self._terms = {k: v for k, v in sorted(clean.items()) if v}
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def const(cls, coords: Sequence[str], value) -> ScalarExpr:
        return cls(coords, {(0,) * len(coords): value})

    @classmethod
    def var(cls, coords: Sequence[str], name: str) -> ScalarExpr:
        coords = tuple(coords)
        if name not in coords:
            raise UnknownCoordinate(f"unknown coordinate {name!r}; known: {coords}")
        return cls.monomial(coords, {name: 1})

    @classmethod
    def monomial(cls, coords: Sequence[str], powers: Mapping[str, int], coeff=1) -> ScalarExpr:
        coords = tuple(coords)
        exps = tuple(powers.get(c, 0) for c in coords)
        unknown = set(powers) - set(coords)
        if unknown:
            raise UnknownCoordinate(f"unknown coordinate(s) {sorted(unknown)}")
        return cls(coords, {exps: coeff})

    @classmethod
    def _raw(cls, coords: tuple[str, ...], terms: dict) -> ScalarExpr:
        obj = cls.__new__(cls)
        obj.coords = coords
        obj._terms = {k: terms[k] for k in sorted(terms)}
        obj._hash = None
        return obj

    # -- inspection ---------------------------------------------------------
    @property
    def terms(self) -> dict[tuple[int, ...], Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        zero = (0,) * len(self.coords)
        return all(k == zero for k in self._terms)

    def constant_value(self) -> Fraction:
        """Value of a constant expression; raises if the expression is not constant."""
        if not self.is_constant():
            raise SymexprError(f"{self} is not constant")
        return self._terms.get((0,) * len(self.coords), Fraction(0))

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def negative_exponent_coords(self) -> set[str]:
        out = set()
        for exps in self._terms:
            out.update(c for c, e in zip(self.coords, exps) if e < 0)
        return out

    def free_coords(self) -> set[str]:
        out = set()
        for exps in self._terms:
            out.update(c for c, e in zip(self.coords, exps) if e)
        return out

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> ScalarExpr | None:
        if isinstance(other, ScalarExpr):
            if other.coords != self.coords:
                raise SymexprError(f"coordinate mismatch: {self.coords} vs {other.coords}")
            return other
        if isinstance(other, (int, Rational)):
            return ScalarExpr.const(self.coords, other)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms = dict(self._terms)
        for k, v in o._terms.items():
            s = terms.get(k, 0) + v
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        return ScalarExpr._raw(self.coords, terms)

    __radd__ = __add__

    def __neg__(self):
        return ScalarExpr._raw(self.coords, {k: -v for k, v in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        terms: dict[tuple[int, ...], Fraction] = {}
        for ka, va in self._terms.items():
            for kb, vb in o._terms.items():
                k = _check_exponents(tuple(a + b for a, b in zip(ka, kb)))
                s = terms.get(k, 0) + va * vb
                if s:
                    terms[k] = s
                else:
                    terms.pop(k, None)
        return ScalarExpr._raw(self.coords, terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def inverse(self) -> ScalarExpr:
        if not self.is_monomial():
            raise NonMonomialDivision(f"cannot invert non-monomial {self}")
        (exps, c), = self._terms.items()
        return ScalarExpr._raw(self.coords, {_check_exponents(tuple(-e for e in exps)): 1 / c})

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        if self.is_monomial():
            (exps, c), = self._terms.items()
            return ScalarExpr._raw(self.coords, {_check_exponents(tuple(e * k for e in exps)): c**k})
        result = ScalarExpr.const(self.coords, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- calculus & evaluation ----------------------------------------------
    def diff(self, coord: str) -> ScalarExpr:
        try:
            i = self.coords.index(coord)
        except ValueError:
            raise UnknownCoordinate(f"unknown coordinate {coord!r}") from None
        terms = {}
        for exps, c in self._terms.items():
            e = exps[i]
            if e:
                k = exps[:i] + (e - 1,) + exps[i + 1:]
                terms[k] = c * e
        return ScalarExpr._raw(self.coords, terms)

    def eval_at(self, point: Mapping[str, object]) -> Fraction:
        missing = [c for c in self.coords if c not in point]
        if missing:
            raise InadmissiblePoint(f"point does not assign {missing}")
        vals = [Fraction(point[c]) for c in self.coords]
        total = Fraction(0)
        for exps, c in self._terms.items():
            term = c
            for v, e, name in zip(vals, exps, self.coords):
                if e < 0 and v == 0:
                    raise InadmissiblePoint(f"{name}=0 is a pole of {self}")
                if e:
                    term *= v**e
            total += term
        return total

    # -- comparison ---------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, ScalarExpr):
            return self.coords == other.coords and self._terms == other._terms
        if isinstance(other, (int, Rational)):
            if other == 0:
                return not self._terms
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if self._hash is None:
            if self.is_constant():
                self._hash = hash(self.constant_value())
            else:
                self._hash = hash((self.coords, tuple(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    # -- printing -----------------------------------------------------------
    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for exps, c in sorted(self._terms.items(), key=lambda kv: tuple(-e for e in kv[0])):
            factors = []
            for name, e in zip(self.coords, exps):
                if e == 1:
                    factors.append(name)
                elif e:
                    factors.append(f"{name}^{e}")
            mag = abs(c)
            if factors:
                body = "*".join(([str(mag)] if mag != 1 else []) + factors)
            else:
                body = str(mag)
            parts.append(("-" if c < 0 else "+", body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __repr__(self):
        return f"ScalarExpr({str(self)!r})"


# -- functional API ---------------------------------------------------------

def add(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    return a + b


def mul(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    return a * b


def neg(a: ScalarExpr) -> ScalarExpr:
    return -a


def pow_int(a: ScalarExpr, k: int) -> ScalarExpr:
    return a**k


def partial_diff(a: ScalarExpr, coord: str) -> ScalarExpr:
    return a.diff(coord)


def eval_at(a: ScalarExpr, point: Mapping[str, object]) -> Fraction:
    return a.eval_at(point)


def is_zero(a) -> bool:
    return a == 0


# -- parser -----------------------------------------------------------------

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S)")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {ch!r}", text, m.start(3))
            tokens.append(("op", ch, m.start(3)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, coords: tuple[str, ...]):
        self.text = text
        self.coords = coords
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ExprSyntaxError(msg, self.text, tok[2])

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] == "end":
            raise self.error(f"expected {value!r}", tok)

    def parse(self) -> ScalarExpr:
        if self.peek()[0] == "end":
            raise self.error("empty expression")
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected {self.peek()[1]!r}")
        return e

    def expr(self) -> ScalarExpr:
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            t = self.term()
            e = e + t if op == "+" else e - t
        return e

    def term(self) -> ScalarExpr:
        e = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()
            f = self.factor()
            if op[1] == "*":
                e = e * f
            else:
                if f.is_zero():
                    raise ExprSyntaxError("division by zero", self.text, op[2])
                if not f.is_monomial():
                    raise NonMonomialDivision(f"division by non-monomial {f} at position {op[2]} in {self.text!r}")
                e = e * f.inverse()
        return e

    def factor(self) -> ScalarExpr:
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            f = self.factor()
            return -f if tok[1] == "-" else f
        base = self.atom()
        while self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            k = self.signed_int()
            if k < 0 and not base.is_monomial():
                raise NonMonomialDivision(f"negative power of non-monomial {base} in {self.text!r}")
            base = base**k
        return base

    def signed_int(self) -> int:
        sign = 1
        tok = self.peek()
        if tok[0] == "op" and tok[1] in ("+", "-"):
            self.take()
            sign = -1 if tok[1] == "-" else 1
        tok = self.take()
        if tok[0] != "int":
            raise self.error("expected integer exponent", tok)
        return sign * int(tok[1])

    def atom(self) -> ScalarExpr:
        tok = self.take()
        if tok[0] == "int":
            return ScalarExpr.const(self.coords, int(tok[1]))
        if tok[0] == "name":
            if tok[1] not in self.coords:
                raise UnknownCoordinate(f"unknown coordinate {tok[1]!r} at position {tok[2]} in {self.text!r}")
            return ScalarExpr.var(self.coords, tok[1])
        if tok[1] == "(":
            e = self.expr()
            self.expect(")")
            return e
        raise self.error(f"unexpected {tok[1]!r}" if tok[0] != "end" else "unexpected end of input", tok)


def parse_expr(text: str, coords: Iterable[str]) -> ScalarExpr:
    """Parse ``text`` into canonical form over ``coords``.

    Grammar: sums and products of rationals and coordinates, ``^`` with
    signed integer exponents, parentheses, and ``/`` by monomials only.
    A leading sign on a factor is accepted (``-x``, ``2*-y``).
    """
    return _Parser(text, tuple(coords)).parse()
