"""Euler characteristics of Kronecker moduli spaces via degeneration to type-one trees.

``chi(M_{a,b}(K(m)))`` is the sum over pairs of weighted partitions of the degeneration
coefficient times ``m^(a_hat + b_hat - 1)`` times the total ``v``-weight of the stable labeled
spanning trees of the pair's support quiver.
"""
from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import Polynomial, factorial, format_fraction
from .partitions import PartitionPair, enumerate_partition_pairs, mps_coefficient
from .quiver import SupportQuiver, is_imaginary_schur_root
from .trees import CensusStats, default_workers, stable_census


@dataclass(frozen=True)
class Summand:
    pair: PartitionPair
    coefficient: Fraction
    chi_pair: Polynomial

    @property
    def contribution(self) -> Polynomial:
        return self.chi_pair * self.coefficient

    def to_json(self) -> dict:
        return {
            "pair": str(self.pair),
            "coefficient": format_fraction(self.coefficient),
            "chi_pair": str(self.chi_pair),
            "contribution": str(self.contribution),
        }


@dataclass
class ChiResult:
    query: tuple[int, int] | PartitionPair
    chi: Polynomial
    stats: CensusStats = field(default_factory=CensusStats)
    summands: list[Summand] = field(default_factory=list)
    elapsed: float = 0.0

    def at(self, m: int) -> Fraction:
        return self.chi(m)

    def to_json(self) -> dict:
        if isinstance(self.query, PartitionPair):
            head = {"pair": str(self.query), "a": self.query.a, "b": self.query.b}
        else:
            head = {"a": self.query[0], "b": self.query[1]}
        return {
            **head,
            "chi": self.chi.to_json(),
            "chi_text": str(self.chi),
            "summands": [s.to_json() for s in self.summands],
            "stats": self.stats.as_dict(),
            "elapsed": round(self.elapsed, 6),
        }


def _pair_census(pair: PartitionPair, workers: int = 1):
    census = stable_census(SupportQuiver.from_pair(pair), workers=workers)
    return census.weight_sum, census.stats


def chi_partition_pair(pair: PartitionPair, workers: int | None = None) -> ChiResult:
    """``m^(a_hat + b_hat - 1) * sum of v(t)`` over stable labeled trees of the pair's support."""
    start = time.perf_counter()
    weight, stats = _pair_census(pair, default_workers() if workers is None else workers)
    exponent = pair.source.hat + pair.sink.hat - 1
    chi = Polynomial.monomial(weight, exponent)
    return ChiResult(pair, chi, CensusStats(**stats.as_dict()), elapsed=time.perf_counter() - start)


def _support_size(pair: PartitionPair) -> tuple[int, int]:
    return pair.source.hat + pair.sink.hat, pair.source.hat * pair.sink.hat


def chi_kronecker(a: int, b: int, workers: int | None = None, m: int | None = None) -> ChiResult:
    """Euler characteristic of ``M^s_{a,b}(K(m))`` as an exact polynomial in ``m``.

    Pass ``m`` to get a warning when ``(a, b)`` is not an imaginary Schur root for that ``m``.
    Summands are reported in partition enumeration order (source partition major).
    """
    if a < 1 or b < 1:
        raise ValueError("a and b must be positive")
    if math.gcd(a, b) != 1:
        raise ValueError(f"({a},{b}) is not coprime; the degeneration formula needs coprime dimension vectors")
    if m is not None and not is_imaginary_schur_root(a, b, m):
        warnings.warn(f"({a},{b}) is not an imaginary Schur root for m={m}", stacklevel=2)
    start = time.perf_counter()
    workers = default_workers() if workers is None else workers
    pairs = enumerate_partition_pairs(a, b)
    # largest supports first: they dominate the runtime and are worth scheduling early
    order = sorted(range(len(pairs)), key=lambda k: _support_size(pairs[k]), reverse=True)
    results: dict[int, tuple[int, CensusStats]] = {}
    if workers > 1 and len(pairs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = {k: pool.submit(_pair_census, pairs[k], 1) for k in order}
            results = {k: f.result() for k, f in futures.items()}
    else:
        for k in order:
            results[k] = _pair_census(pairs[k], 1)
    stats = CensusStats()
    summands = []
    chi = Polynomial()
    for k, pair in enumerate(pairs):
        weight, st = results[k]
        stats += st
        exponent = pair.source.hat + pair.sink.hat - 1
        summand = Summand(pair, mps_coefficient(pair), Polynomial.monomial(weight, exponent))
        summands.append(summand)
        chi = chi + summand.contribution
    return ChiResult((a, b), chi, stats, summands, time.perf_counter() - start)


def labeled_stable_tree_count(a: int, k: int) -> int:
    """Spanning trees of ``K_{a,ka+1}`` in which every source has exactly ``k+1`` edges."""
    if a < 1 or k < 1:
        raise ValueError("a and k must be positive")
    value = Fraction(factorial(k * a), k * a + 1) * Fraction(k * a + 1, factorial(k)) ** a
    if value.denominator != 1:
        raise ArithmeticError(f"closed form gave a non-integer count {value} for a={a}, k={k}")
    return value.numerator


def chi_trivial_aka_closed_form(a: int, k: int) -> Polynomial:
    """``chi`` of the trivial pair ``(1*a, 1*(ka+1))``: ``m^((k+1)a) (ka)!/(ka+1) ((ka+1)/k!)^a``."""
    return Polynomial.monomial(labeled_stable_tree_count(a, k), (k + 1) * a)


def t_weight_sum_closed_form(a: int, k: int) -> Fraction:
    """Automorphism-weighted number of unlabeled stable trees for ``(1*a, 1*(ka+1))``."""
    if a < 1 or k < 1:
        raise ValueError("a and k must be positive")
    n = k * a + 1
    return Fraction(1, n * n) * Fraction(1, factorial(a)) * Fraction(n, factorial(k)) ** a
