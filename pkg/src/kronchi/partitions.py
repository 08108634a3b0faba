"""Weighted partitions ``a = sum_l l * a_l`` and the degeneration coefficients built on them."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Mapping

import mpmath

from .algebra import binomial, factorial


@dataclass(frozen=True, order=True)
class WeightedPartition:
    """A multiset of part sizes, stored as ``((size, multiplicity), ...)`` by increasing size.

    Zero multiplicities are never stored.
    """

    parts: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for size, mult in self.parts:
            if size < 1 or mult < 1:
                raise ValueError(f"invalid part {size}*{mult}")
            if size in seen:
                raise ValueError(f"duplicate part size {size}")
            seen.add(size)
        if not self.parts:
            raise ValueError("empty partition")
        object.__setattr__(self, "parts", tuple(sorted(self.parts)))

    @classmethod
    def from_mapping(cls, parts: Mapping[int, int]) -> "WeightedPartition":
        return cls(tuple((int(l), int(n)) for l, n in parts.items() if n))

    @classmethod
    def from_sizes(cls, sizes) -> "WeightedPartition":
        counts: dict[int, int] = {}
        for s in sizes:
            counts[s] = counts.get(s, 0) + 1
        return cls.from_mapping(counts)

    @classmethod
    def trivial(cls, a: int) -> "WeightedPartition":
        return cls(((1, a),))

    @classmethod
    def parse(cls, text: str) -> "WeightedPartition":
        """Parse ``'1*2+2*1'`` (size*multiplicity terms) or a JSON ``{"parts": ...}`` document."""
        text = text.strip()
        if text.startswith("{"):
            return cls.from_json(json.loads(text))
        counts: dict[int, int] = {}
        for term in text.split("+"):
            size, _, mult = term.strip().partition("*")
            counts[int(size)] = counts.get(int(size), 0) + (int(mult) if mult else 1)
        return cls.from_mapping(counts)

    def multiplicity(self, size: int) -> int:
        return dict(self.parts).get(size, 0)

    def as_dict(self) -> dict[int, int]:
        return dict(self.parts)

    @property
    def total(self) -> int:
        return sum(l * n for l, n in self.parts)

    @property
    def hat(self) -> int:
        """Number of parts."""
        return sum(n for _, n in self.parts)

    @property
    def tilde(self) -> int:
        return self.total - self.hat

    def sizes(self) -> list[int]:
        """Part sizes in increasing order, with repetition."""
        return [l for l, n in self.parts for _ in range(n)]

    def is_trivial(self) -> bool:
        return self.parts == ((1, self.total),)

    def __str__(self) -> str:
        return "+".join(f"{l}*{n}" for l, n in self.parts)

    def to_json(self) -> dict:
        return {"parts": {str(l): n for l, n in self.parts}}

    @classmethod
    def from_json(cls, doc: Mapping) -> "WeightedPartition":
        return cls.from_mapping({int(k): int(v) for k, v in doc["parts"].items()})


@dataclass(frozen=True)
class PartitionPair:
    source: WeightedPartition
    sink: WeightedPartition

    @property
    def a(self) -> int:
        return self.source.total

    @property
    def b(self) -> int:
        return self.sink.total

    def is_trivial(self) -> bool:
        return self.source.is_trivial() and self.sink.is_trivial()

    def __str__(self) -> str:
        return f"({self.source},{self.sink})"

    @classmethod
    def parse(cls, text: str) -> "PartitionPair":
        body = text.strip().removeprefix("(").removesuffix(")")
        left, right = body.split(",")
        return cls(WeightedPartition.parse(left), WeightedPartition.parse(right))

    @classmethod
    def trivial(cls, a: int, b: int) -> "PartitionPair":
        return cls(WeightedPartition.trivial(a), WeightedPartition.trivial(b))


def _partition_sizes(a: int, smallest: int) -> Iterator[list[int]]:
    if a == 0:
        yield []
        return
    for first in range(smallest, a + 1):
        for rest in _partition_sizes(a - first, first):
            yield [first] + rest


@lru_cache(maxsize=None)
def _enumerate(a: int) -> tuple[WeightedPartition, ...]:
    return tuple(WeightedPartition.from_sizes(s) for s in _partition_sizes(a, 1))


def enumerate_partitions(a: int) -> list[WeightedPartition]:
    """All weighted partitions of ``a``, ordered lexicographically by their increasing size lists.

    >>> [str(p) for p in enumerate_partitions(3)]
    ['1*3', '1*1+2*1', '3*1']
    """
    if a < 1:
        raise ValueError(f"a must be positive, got {a}")
    return list(_enumerate(a))


def enumerate_partition_pairs(a: int, b: int) -> list[PartitionPair]:
    return [PartitionPair(p, q) for p in enumerate_partitions(a) for q in enumerate_partitions(b)]


def mps_coefficient(pair: PartitionPair) -> Fraction:
    """``prod_l (-1)^((a_l+b_l)(l-1)) / (a_l! b_l! l^(2(a_l+b_l)))``."""
    src, snk = pair.source.as_dict(), pair.sink.as_dict()
    coeff = Fraction(1)
    for l in set(src) | set(snk):
        al, bl = src.get(l, 0), snk.get(l, 0)
        sign = -1 if ((al + bl) * (l - 1)) % 2 else 1
        coeff *= Fraction(sign, factorial(al) * factorial(bl) * l ** (2 * (al + bl)))
    return coeff


def multinomial_sum(a: int, a_hat: int) -> int:
    """Sum of ``a_hat! / prod a_l!`` over weighted partitions of ``a`` with ``a_hat`` parts."""
    total = 0
    for p in enumerate_partitions(a):
        if p.hat == a_hat:
            denom = 1
            for _, n in p.parts:
                denom *= factorial(n)
            total += factorial(a_hat) // denom
    return total


def composition_count(a: int, a_hat: int) -> int:
    """Number of compositions of ``a`` into ``a_hat`` positive parts, ``C(a-1, a_hat-1)``."""
    if not 1 <= a_hat <= a:
        raise ValueError(f"need 1 <= a_hat <= a, got a={a}, a_hat={a_hat}")
    return binomial(a - 1, a_hat - 1)


def partition_count_bound(a: int, prec: int = 128) -> mpmath.mpf:
    """``exp(pi * sqrt(2a/3))``, an upper bound on the number of partitions of ``a``."""
    if a < 1:
        raise ValueError(f"a must be positive, got {a}")
    with mpmath.workprec(prec):
        return +mpmath.exp(mpmath.pi * mpmath.sqrt(mpmath.mpf(2 * a) / 3))
