"""Exact integer/rational helpers and sparse polynomials in the arrow count ``m``.

Integers are Python ``int`` and rationals are :class:`fractions.Fraction`,
which already normalize to lowest terms with a positive denominator.
"""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Union

Number = Union[int, Fraction]


def factorial(n: int) -> int:
    if n < 0:
        raise ValueError(f"factorial of negative number {n}")
    return math.factorial(n)


def binomial(n: int, k: int) -> int:
    """``C(n, k)``, zero when ``k`` is outside ``[0, n]``."""
    if k < 0 or k > n or n < 0:
        return 0
    return math.comb(n, k)


def format_fraction(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


class Polynomial:
    """Immutable sparse univariate polynomial over Q in the symbol ``m``.

    >>> p = Polynomial({4: Fraction(1, 2), 3: Fraction(-4, 3), 2: 1, 1: Fraction(-1, 6)})
    >>> str(p)
    '1/2*m^4 - 4/3*m^3 + m^2 - 1/6*m'
    >>> p(3)
    Fraction(13, 1)
    """

    __slots__ = ("_coeffs", "_hash")

    def __init__(self, coeffs: Mapping[int, Number] | None = None):
        clean: dict[int, Fraction] = {}
        for e, c in (coeffs or {}).items():
            if not isinstance(e, int) or e < 0:
                raise ValueError(f"exponent must be a non-negative int, got {e!r}")
            c = Fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self._coeffs = dict(sorted(clean.items(), reverse=True))
        self._hash = None

    @classmethod
    def monomial(cls, coeff: Number, exponent: int) -> "Polynomial":
        return cls({exponent: coeff})

    @classmethod
    def zero(cls) -> "Polynomial":
        return cls()

    @property
    def coeffs(self) -> dict[int, Fraction]:
        return dict(self._coeffs)

    def coefficient(self, exponent: int) -> Fraction:
        return self._coeffs.get(exponent, Fraction(0))

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return max(self._coeffs, default=-1)

    def terms(self) -> Iterator[tuple[int, Fraction]]:
        """(exponent, coefficient) pairs by descending exponent."""
        return iter(self._coeffs.items())

    def is_zero(self) -> bool:
        return not self._coeffs

    def __call__(self, m: Number) -> Fraction:
        return sum((c * Fraction(m) ** e for e, c in self._coeffs.items()), Fraction(0))

    evaluate = __call__

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return Polynomial({0: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._coeffs)
        for e, c in other._coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial({e: -c for e, c in self._coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Polynomial({e: c * other for e, c in self._coeffs.items()})
        if isinstance(other, Polynomial):
            out: dict[int, Fraction] = {}
            for e1, c1 in self._coeffs.items():
                for e2, c2 in other._coeffs.items():
                    out[e1 + e2] = out.get(e1 + e2, Fraction(0)) + c1 * c2
            return Polynomial(out)
        return NotImplemented

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._coeffs.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Polynomial({str(self)!r})"

    def __str__(self) -> str:
        if not self._coeffs:
            return "0"
        parts = []
        for idx, (e, c) in enumerate(self._coeffs.items()):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if e == 0:
                body = format_fraction(mag)
            else:
                var = "m" if e == 1 else f"m^{e}"
                body = var if mag == 1 else f"{format_fraction(mag)}*{var}"
            if idx == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    def to_json(self) -> dict:
        return {"coeffs": [[e, format_fraction(c)] for e, c in self._coeffs.items()]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "Polynomial":
        return cls({int(e): Fraction(c) for e, c in doc["coeffs"]})

    _TERM = re.compile(r"^(?:(?P<c>\d+(?:/\d+)?)(?:\*(?P<v1>m(?:\^\d+)?))?|(?P<v2>m(?:\^\d+)?))$")

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        """Inverse of ``str``: accepts e.g. ``'1/2*m^4 - 4/3*m^3 + m^2 - 1/6*m'``."""
        s = text.replace(" ", "")
        if s in ("", "0"):
            return cls()
        if s[0] not in "+-":
            s = "+" + s
        coeffs: dict[int, Fraction] = {}
        for sign, body in re.findall(r"([+-])([^+-]+)", s):
            match = cls._TERM.match(body)
            if not match:
                raise ValueError(f"cannot parse term {body!r} in {text!r}")
            coef = Fraction(match["c"]) if match["c"] else Fraction(1)
            var = match["v1"] or match["v2"]
            exp = 0 if var is None else (int(var[2:]) if "^" in var else 1)
            coeffs[exp] = coeffs.get(exp, Fraction(0)) + (coef if sign == "+" else -coef)
        return cls(coeffs)


def poly_eval(p: Polynomial, m: Number) -> Fraction:
    return p(m)


def poly_sum(polys: Iterable[Polynomial]) -> Polynomial:
    total = Polynomial()
    for p in polys:
        total = total + p
    return total
