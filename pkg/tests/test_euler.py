import math
import warnings
from fractions import Fraction

import pytest

from kronchi.algebra import Polynomial, binomial
from kronchi.euler import (
    chi_kronecker,
    chi_partition_pair,
    chi_trivial_aka_closed_form,
    labeled_stable_tree_count,
    t_weight_sum_closed_form,
)
from kronchi.partitions import PartitionPair, WeightedPartition, enumerate_partition_pairs
from kronchi.quiver import SupportQuiver, is_imaginary_schur_root
from kronchi.trees import automorphism_weighted_sum, enumerate_spanning_trees

P = WeightedPartition.parse
CHI_23 = Polynomial({4: Fraction(1, 2), 3: Fraction(-4, 3), 2: 1, 1: Fraction(-1, 6)})


def pair(src, snk):
    return PartitionPair(P(src), P(snk))


@pytest.mark.parametrize(
    "src, snk, expected",
    [("1*1", "1*1", Polynomial({1: 1})), ("1*2", "1*3", Polynomial({4: 6})), ("2*1", "3*1", Polynomial({1: 6}))],
)
def test_chi_partition_pair(src, snk, expected):
    assert chi_partition_pair(pair(src, snk)).chi == expected


def test_reference_polynomial():
    assert chi_kronecker(2, 3).chi == CHI_23


def test_small_oracles():
    assert chi_kronecker(1, 1).chi == Polynomial({1: 1})
    assert chi_kronecker(1, 2).chi == Polynomial({2: Fraction(1, 2), 1: Fraction(-1, 2)})


def test_grassmannian_oracle():
    for b in range(1, 5):
        chi = chi_kronecker(1, b).chi
        for m in range(3, 9):
            assert chi(m) == binomial(m, b)


def test_non_coprime_rejected_and_warning():
    with pytest.raises(ValueError):
        chi_kronecker(2, 4)
    with pytest.warns(UserWarning):
        chi_kronecker(1, 3, m=3)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        chi_kronecker(2, 3, m=3)


def test_summands_monomials_have_expected_exponent():
    for a, b in [(2, 3), (3, 4), (2, 5), (3, 5)]:
        result = chi_kronecker(a, b)
        assert len(result.summands) == len(enumerate_partition_pairs(a, b))
        for s in result.summands:
            ((exponent, coeff),) = s.chi_pair.terms() if not s.chi_pair.is_zero() else [(None, 0)]
            if exponent is not None:
                assert exponent == s.pair.source.hat + s.pair.sink.hat - 1
                assert coeff.denominator == 1 and coeff > 0


@pytest.mark.parametrize("a, k", [(1, 1), (2, 1), (3, 1), (1, 2), (2, 2)])
def test_closed_form_matches_census(a, k):
    assert chi_partition_pair(PartitionPair.trivial(a, k * a + 1)).chi == chi_trivial_aka_closed_form(a, k)


def test_closed_form_examples():
    assert all(chi_trivial_aka_closed_form(1, k) == Polynomial({k + 1: 1}) for k in range(1, 6))
    assert chi_trivial_aka_closed_form(2, 1) == Polynomial({4: 6})
    assert chi_trivial_aka_closed_form(2, 2) == Polynomial({6: 30})


def test_labeled_counts():
    assert labeled_stable_tree_count(2, 1) == 6
    assert all(labeled_stable_tree_count(1, k) == 1 for k in range(1, 6))
    assert labeled_stable_tree_count(3, 1) == 96
    # k = 1 gives a!(a+1)^(a-1)
    for a in range(1, 10):
        assert labeled_stable_tree_count(a, 1) == math.factorial(a) * (a + 1) ** (a - 1)


def test_labeled_count_is_census_of_degree_constrained_trees():
    for a, k in [(2, 1), (3, 1), (2, 2), (1, 3)]:
        q = SupportQuiver.from_levels([1] * a, [1] * (k * a + 1))
        constrained = sum(
            1 for t in enumerate_spanning_trees(q) if all(t.degree(s) == k + 1 for s in q.source_labels)
        )
        assert constrained == labeled_stable_tree_count(a, k)


def test_t_weight_examples():
    for k in range(1, 6):
        assert t_weight_sum_closed_form(1, k) == Fraction(1, math.factorial(k + 1))
    assert t_weight_sum_closed_form(2, 1) == Fraction(1, 2)
    assert t_weight_sum_closed_form(2, 2) == Fraction(1, 8)


def test_labeled_equals_scaled_t():
    for a in range(1, 7):
        for k in range(1, 4):
            scale = math.factorial(a) * math.factorial(k * a + 1)
            assert scale * t_weight_sum_closed_form(a, k) == labeled_stable_tree_count(a, k)


@pytest.mark.parametrize("a, k", [(2, 1), (3, 1), (2, 2)])
def test_t_weight_against_census(a, k):
    q = SupportQuiver.from_levels([1] * a, [1] * (k * a + 1))
    assert automorphism_weighted_sum(q) == t_weight_sum_closed_form(a, k)


def test_dualities_pointwise():
    for a in range(1, 4):
        for b in range(1, 4):
            if math.gcd(a, b) != 1:
                continue
            chi = chi_kronecker(a, b).chi
            for m in (3, 4):
                assert chi(m) == chi_kronecker(b, a).chi(m)
                if m * a - b >= 1:
                    assert chi(m) == chi_kronecker(a, m * a - b).chi(m)


def test_reflection_example():
    assert chi_kronecker(2, 5).chi(4) == chi_kronecker(2, 3).chi(4) == 58


def test_integrality_and_positivity():
    for a in range(1, 7):
        for b in range(1, 9 - a):
            if math.gcd(a, b) != 1:
                continue
            result = chi_kronecker(a, b)
            assert result.stats.stable <= result.stats.enumerated
            for m in range(1, 11):
                assert result.chi(m).denominator == 1
                if m >= 3 and is_imaginary_schur_root(a, b, m):
                    assert result.chi(m) >= 1


def test_parallel_matches_serial():
    from kronchi.trees import clear_cache

    clear_cache()
    assert chi_kronecker(3, 5, workers=3).chi == chi_kronecker(3, 5, workers=1).chi


def test_chi_result_json():
    doc = chi_kronecker(2, 3).to_json()
    assert doc["a"] == 2 and doc["b"] == 3
    assert Polynomial.from_json(doc["chi"]) == CHI_23
    by_pair = {s["pair"]: s for s in doc["summands"]}
    assert by_pair["(2*1,3*1)"]["coefficient"] == "-1/36"
    assert by_pair["(2*1,3*1)"]["chi_pair"] == "6*m"
