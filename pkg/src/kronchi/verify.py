"""Invariant suites behind ``kronchi verify``.

Each check returns ``(passed, detail)``. ``quick`` keeps every census small enough to finish in
seconds; ``full`` widens the grids.
"""
from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .algebra import Polynomial, binomial
from .bounds import chi_partition_upper_bound, chi_upper_bound, mpf_to_fraction
from .euler import (
    chi_kronecker,
    chi_partition_pair,
    chi_trivial_aka_closed_form,
    labeled_stable_tree_count,
    t_weight_sum_closed_form,
)
from .partitions import PartitionPair, enumerate_partition_pairs
from .quiver import SupportQuiver, is_imaginary_schur_root, king_theta, slope
from .splitting import apply_split, find_valid_splits
from .trees import (
    automorphism_weighted_sum,
    cayley_count,
    enumerate_spanning_trees,
    is_stable,
    prufer_spanning_trees,
    spanning_tree_masks,
)

CHI_23 = Polynomial({4: Fraction(1, 2), 3: Fraction(-4, 3), 2: 1, 1: Fraction(-1, 6)})


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def check_reference_polynomial(full: bool) -> tuple[bool, str]:
    chi = chi_kronecker(2, 3).chi
    return chi == CHI_23, str(chi)


def check_grassmannian(full: bool) -> tuple[bool, str]:
    bad = []
    for b in range(1, 5 if full else 4):
        chi = chi_kronecker(1, b).chi
        for m in range(3, 9):
            if chi(m) != binomial(m, b):
                bad.append((b, m))
    return not bad, f"mismatches: {bad}" if bad else "chi(1,b) = C(m,b)"


def check_closed_forms(full: bool) -> tuple[bool, str]:
    grid = [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2)] + ([(4, 1), (1, 3)] if full else [])
    bad = []
    for a, k in grid:
        pair = PartitionPair.trivial(a, k * a + 1)
        if chi_partition_pair(pair).chi != chi_trivial_aka_closed_form(a, k):
            bad.append((a, k))
    return not bad, f"mismatches: {bad}" if bad else f"{len(grid)} cases agree"


def check_source_degrees(full: bool) -> tuple[bool, str]:
    violations = 0
    for a, k in [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2)]:
        q = SupportQuiver.from_levels([1] * a, [1] * (k * a + 1))
        for t in enumerate_spanning_trees(q, stable_only=True):
            violations += any(t.degree(s) != k + 1 for s in q.source_labels)
    return violations == 0, f"{violations} violations"


def check_cayley(full: bool) -> tuple[bool, str]:
    limit = 5 if full else 4
    bad = []
    for a in range(1, limit + 1):
        for b in range(1, limit + 1):
            census = set(spanning_tree_masks(a, b))
            oracle = set(prufer_spanning_trees(a, b))
            if not (len(census) == cayley_count(a, b) and census == oracle):
                bad.append((a, b))
    return not bad, f"mismatches: {bad}" if bad else f"all a,b <= {limit}"


def check_orbit_sums(full: bool) -> tuple[bool, str]:
    bad = []
    for a, k in [(2, 1), (3, 1), (2, 2)]:
        q = SupportQuiver.from_levels([1] * a, [1] * (k * a + 1))
        census_t = automorphism_weighted_sum(q)
        closed_t = t_weight_sum_closed_form(a, k)
        scale = math.factorial(a) * math.factorial(k * a + 1)
        if not (census_t == closed_t and scale * closed_t == labeled_stable_tree_count(a, k)):
            bad.append((a, k))
    return not bad, f"mismatches: {bad}" if bad else "orbit sums agree"


def check_dualities(full: bool) -> tuple[bool, str]:
    limit = 4 if full else 3
    bad = []
    for a, b in itertools.product(range(1, limit + 1), repeat=2):
        if math.gcd(a, b) != 1:
            continue
        chi = chi_kronecker(a, b).chi
        for m in (3, 4, 5) if full else (3, 4):
            if chi(m) != chi_kronecker(b, a).chi(m):
                bad.append(("transpose", a, b, m))
            r = m * a - b
            if r >= 1 and chi(m) != chi_kronecker(a, r).chi(m):
                bad.append(("reflection", a, b, m))
    return not bad, f"mismatches: {bad}" if bad else "dualities respected"


def check_integrality(full: bool) -> tuple[bool, str]:
    limit = 8 if full else 7
    bad = []
    for a in range(1, limit):
        for b in range(1, limit + 1 - a):
            if math.gcd(a, b) == 1:
                chi = chi_kronecker(a, b).chi
                bad += [(a, b, m) for m in range(1, 11) if chi(m).denominator != 1]
    return not bad, f"non-integer values: {bad}" if bad else "all integer"


def check_bounds(full: bool) -> tuple[bool, str]:
    m = 3
    bad = []
    for a in range(1, 8):
        for b in range(1, 9 - a):
            if math.gcd(a, b) != 1:
                continue
            result = chi_kronecker(a, b)
            if result.chi(m) > mpf_to_fraction(chi_upper_bound(a, b, m)):
                bad.append(("total", a, b))
            for s in result.summands:
                if s.chi_pair(m) > chi_partition_upper_bound(s.pair, m):
                    bad.append(("pair", str(s.pair)))
    return not bad, f"violations: {bad}" if bad else "bounds hold at m=3"


def check_splitting(full: bool) -> tuple[bool, str]:
    cases = [(2, 3), (2, 5), (3, 4)] + ([(3, 5)] if full else [])
    bad = 0
    checked = 0
    for a, b in cases:
        for pair in enumerate_partition_pairs(a, b):
            if pair.source.is_trivial():
                continue
            q = SupportQuiver.from_pair(pair)
            for t in enumerate_spanning_trees(q, stable_only=True):
                for s, l in q.sources:
                    if l < 2:
                        continue
                    moves = find_valid_splits(t, s)
                    checked += 1
                    bad += not moves or not all(is_stable(apply_split(t, mv)) for mv in moves)
    return bad == 0, f"{checked} split sites, {bad} failures"


def check_slope_king(full: bool) -> tuple[bool, str]:
    rng = random.Random(20240518)
    exceptions = 0
    trials = 1000 if full else 300
    for _ in range(trials):
        q = SupportQuiver.from_levels(
            [rng.randint(1, 4) for _ in range(rng.randint(1, 4))],
            [rng.randint(1, 4) for _ in range(rng.randint(1, 4))],
        )
        labels = q.source_labels + q.sink_labels
        while True:
            d = {s: rng.randint(0, 3) for s in labels}
            e = {s: rng.randint(0, 3) for s in labels}
            if q.kappa(d) and q.kappa(e):
                break
        m = rng.randint(1, 6)
        diff = slope(e, q) - slope(d, q)
        exceptions += (diff > 0) - (diff < 0) != _sign(king_theta(e, d, q, m))
    return exceptions == 0, f"{exceptions} exceptions in {trials} trials"


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def check_schur_positive(full: bool) -> tuple[bool, str]:
    bad = []
    for a in range(1, 4):
        for b in range(1, 6):
            if math.gcd(a, b) != 1:
                continue
            chi = chi_kronecker(a, b).chi
            bad += [(a, b, m) for m in range(3, 7) if is_imaginary_schur_root(a, b, m) and chi(m) < 1]
    return not bad, f"non-positive: {bad}" if bad else "chi >= 1 on Schur roots"


CHECKS: list[tuple[str, Callable[[bool], tuple[bool, str]]]] = [
    ("reference (2,3) polynomial", check_reference_polynomial),
    ("Grassmannian oracle", check_grassmannian),
    ("closed form vs census", check_closed_forms),
    ("stable source degrees", check_source_degrees),
    ("Cayley / Prufer census", check_cayley),
    ("orbit-sum identity", check_orbit_sums),
    ("dualities", check_dualities),
    ("integrality", check_integrality),
    ("upper bounds", check_bounds),
    ("split existence", check_splitting),
    ("slope / King sign", check_slope_king),
    ("Schur roots positive", check_schur_positive),
]


def run_checks(full: bool = False) -> list[CheckResult]:
    results = []
    for name, fn in CHECKS:
        start = time.perf_counter()
        try:
            ok, detail = fn(full)
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, ok, detail, time.perf_counter() - start))
    return results
