"""Upper bounds for Kronecker Euler characteristics and the asymptotic comparison functions.

Bounds are evaluated in interval arithmetic (``mpmath.iv``) and reported by their upper
endpoint, so a comparison ``chi <= bound`` against an exact rational is sound.
"""
from __future__ import annotations

import csv
import io
import math
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import mpmath
from mpmath import iv

from .algebra import factorial
from .euler import chi_kronecker
from .partitions import PartitionPair
from .quiver import is_imaginary_schur_root, moduli_dimension

PREC = 160


@contextmanager
def _iv_precision(prec: int) -> Iterator[None]:
    old = iv.prec
    iv.prec = max(prec, old)
    try:
        yield
    finally:
        iv.prec = old


def _upper(x) -> mpmath.mpf:
    return mpmath.mp.make_mpf(x._mpi_[1])


def _mpf(x) -> mpmath.mpf:
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def mpf_to_fraction(x: mpmath.mpf) -> Fraction:
    man, exp = x.man_exp
    return Fraction(man) * Fraction(2) ** exp


def chi_upper_bound(a: int, b: int, m: int, prec: int = PREC) -> mpmath.mpf:
    """``2^(a+b) m^(a+b-1) exp(pi sqrt(2/3) (sqrt a + sqrt b)) b^(a+1/2) a^(b+1/2) / (a! b!)``, rounded up."""
    if a < 1 or b < 1 or m < 1:
        raise ValueError("a, b, m must be positive")
    with _iv_precision(prec):
        exact = Fraction(2 ** (a + b) * m ** (a + b - 1) * b**a * a**b, factorial(a) * factorial(b))
        value = iv.mpf(exact.numerator) / exact.denominator
        value *= iv.exp(iv.pi * iv.sqrt(iv.mpf(2) / 3) * (iv.sqrt(a) + iv.sqrt(b)))
        value *= iv.sqrt(a * b)
        return _upper(value)


def chi_partition_upper_bound(pair: PartitionPair, m: int) -> int:
    """``m^(a_hat+b_hat-1) b^a_hat a^b_hat prod_l l^(a_l+b_l)``; exact, no rounding needed."""
    src, snk = pair.source.as_dict(), pair.sink.as_dict()
    a, b = pair.a, pair.b
    level_prod = math.prod(l ** (src.get(l, 0) + snk.get(l, 0)) for l in set(src) | set(snk))
    return m ** (pair.source.hat + pair.sink.hat - 1) * b**pair.source.hat * a**pair.sink.hat * level_prod


def trivial_partition_upper_bound(a: int, b: int, m: int) -> int:
    return m ** (a + b - 1) * a ** (b - 1) * b ** (a - 1)


def schur_interval(m: int, prec: int = PREC) -> tuple[mpmath.mpf, mpmath.mpf]:
    """``((m - sqrt(m^2-4))/2, (m + sqrt(m^2-4))/2)``."""
    with mpmath.workprec(prec):
        root = mpmath.sqrt(m * m - 4)
        return (m - root) / 2, (m + root) / 2


def growth_constant(m: int, prec: int = PREC) -> mpmath.mpf:
    with mpmath.workprec(prec):
        return (m - 1) ** 2 * mpmath.log((m - 1) ** 2) - (m * m - 2 * m) * mpmath.log(m * m - 2 * m)


def f_conjectural(m: int, k, prec: int = PREC) -> mpmath.mpf:
    """Conjectured growth rate ``K / sqrt(m-2) * sqrt(k(m-k) - 1)`` (not proven)."""
    m1, m2 = schur_interval(m, prec)
    with mpmath.workprec(prec):
        k = _mpf(k)
        if not m1 <= k <= m2:
            raise ValueError(f"k={k} outside [{m1}, {m2}]")
        inner = k * (m - k) - 1
        # endpoints are roots of k(m-k) = 1; rounding may push inner slightly negative
        inner = max(inner, mpmath.mpf(0))
        return growth_constant(m, prec) / mpmath.sqrt(m - 2) * mpmath.sqrt(inner)


def g_upper_rate(m: int, k, prec: int = PREC) -> mpmath.mpf:
    with mpmath.workprec(prec):
        k = _mpf(k)
        return (k + 1) * (mpmath.log(m) + mpmath.log(2) + 1) - (k - 1) * mpmath.log(k)


def i_trivial_rate(m: int, k: int, prec: int = PREC) -> mpmath.mpf:
    """Growth rate of the trivial-partition summand: ``(k+1) ln m + 1 - ln((k-1)!)``."""
    if int(k) != k or k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    with mpmath.workprec(prec):
        return (k + 1) * mpmath.log(m) + 1 - mpmath.log(factorial(int(k) - 1))


@dataclass(frozen=True)
class AsymptoticValues:
    f: mpmath.mpf
    g: mpmath.mpf
    h: mpmath.mpf
    i_triv: mpmath.mpf | None


def asymptotic_values(m: int, k, prec: int = PREC) -> AsymptoticValues:
    """``f`` (conjectural), ``g``, ``h = g/f`` and, for integer ``k``, ``i_triv``."""
    if m < 3:
        raise ValueError("need m >= 3")
    f = f_conjectural(m, k, prec)
    g = g_upper_rate(m, k, prec)
    with mpmath.workprec(prec):
        h = g / f if f else mpmath.inf
    i = i_trivial_rate(m, int(k), prec) if int(k) == k and k >= 1 else None
    return AsymptoticValues(f, g, h, i)


@dataclass(frozen=True)
class BoundReport:
    a: int
    b: int
    m: int
    chi_value: Fraction
    upper_bound: mpmath.mpf
    k: Fraction
    f: mpmath.mpf
    g: mpmath.mpf
    h: mpmath.mpf
    i_triv: mpmath.mpf | None
    m1: mpmath.mpf
    m2: mpmath.mpf

    @property
    def ratio(self) -> mpmath.mpf:
        return mpmath.mpf(self.chi_value.numerator) / self.chi_value.denominator / self.upper_bound

    @property
    def schur_root(self) -> bool:
        return is_imaginary_schur_root(self.a, self.b, self.m)

    @property
    def dimension(self) -> int:
        return moduli_dimension(self.a, self.b, self.m)

    def bound_holds(self) -> bool:
        return self.chi_value <= mpf_to_fraction(self.upper_bound)

    def row(self) -> dict:
        fmt = lambda x: "" if x is None else mpmath.nstr(x, 12)
        return {
            "a": self.a,
            "b": self.b,
            "m": self.m,
            "chi": str(self.chi_value),
            "upper_bound": mpmath.nstr(self.upper_bound, 12),
            "ratio": mpmath.nstr(self.ratio, 6),
            "k": str(self.k),
            "f": fmt(self.f),
            "g": fmt(self.g),
            "h": fmt(self.h),
            "i_triv": fmt(self.i_triv),
            "schur_root": self.schur_root,
            "dimension": self.dimension,
        }


CSV_COLUMNS = ["a", "b", "m", "chi", "upper_bound", "ratio", "k", "f", "g", "h", "i_triv", "schur_root", "dimension"]


def bound_report(a: int, b: int, m: int, workers: int | None = None) -> BoundReport:
    chi = chi_kronecker(a, b, workers=workers).chi(m)
    k = Fraction(b, a)
    m1, m2 = schur_interval(m)
    vals = asymptotic_values(m, k)
    return BoundReport(a, b, m, chi, chi_upper_bound(a, b, m), k, vals.f, vals.g, vals.h, vals.i_triv, m1, m2)


def bound_table(a_max: int, m: int, workers: int | None = None) -> list[BoundReport]:
    """One row per coprime imaginary Schur root ``(a, b)`` with ``a <= a_max``.

    The census cost grows roughly like ``a^(b-1) b^(a-1)``; ``a_max <= 5`` is desk scale.
    """
    if m < 3:
        raise ValueError("need m >= 3")
    rows = []
    for a in range(1, a_max + 1):
        for b in range(1, m * a + 1):
            if math.gcd(a, b) == 1 and is_imaginary_schur_root(a, b, m):
                rows.append(bound_report(a, b, m, workers))
    return rows


def table_to_csv(rows: list[BoundReport]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow(r.row())
    return buf.getvalue()
