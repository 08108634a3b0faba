import itertools
import math
import random
from fractions import Fraction

import networkx as nx
import pytest
from networkx.algorithms.isomorphism import GraphMatcher

from conftest import make_tree
from kronchi.partitions import PartitionPair, WeightedPartition
from kronchi.quiver import SupportQuiver, slope
from kronchi.trees import (
    LocalizationTree,
    _iter_trees,
    automorphism_count,
    automorphism_weight,
    automorphism_weighted_sum,
    canonical_form,
    cayley_count,
    degree_product_bound,
    enumerate_spanning_trees,
    is_stable,
    matrix_tree_weight,
    prufer_decode,
    prufer_encode,
    prufer_spanning_trees,
    spanning_tree_masks,
    stable_census,
    tree_weight_edges,
    tree_weight_v,
    vertex_weight,
)


def brute_stable(t: LocalizationTree) -> bool:
    """Every arrow-closed proper nonempty vertex subset must have smaller slope."""
    q = t.support
    labels = q.source_labels + q.sink_labels
    full = slope(q.full_dimension(), q)
    for r in range(1, len(labels)):
        for subset in itertools.combinations(labels, r):
            chosen = set(subset)
            if any(i in chosen and j not in chosen for i, j in t.edges):
                continue
            if slope({s: 1 for s in chosen}, q) >= full:
                return False
    return True


def nx_automorphisms(t: LocalizationTree) -> int:
    g = nx.Graph()
    for s, l in t.support.sources:
        g.add_node(s, colour=("src", l))
    for s, l in t.support.sinks:
        g.add_node(s, colour=("snk", l))
    g.add_edges_from(t.edges)
    matcher = GraphMatcher(g, g, node_match=lambda x, y: x["colour"] == y["colour"])
    return sum(1 for _ in matcher.isomorphisms_iter())


def test_tree_validation():
    with pytest.raises(ValueError):
        make_tree([1, 1], [1, 1], [("i_1_1", "j_1_1"), ("i_1_1", "j_1_2")])
    with pytest.raises(ValueError):
        make_tree([1, 1], [1, 1], [("i_1_1", "j_1_1"), ("i_1_1", "j_1_2"), ("i_1_2", "j_1_1"), ("i_1_2", "j_1_2")])
    with pytest.raises(ValueError):
        make_tree([1], [1], [("j_1_1", "i_1_1")])


def test_json_roundtrip_and_diagram():
    t = make_tree([1, 1], [1, 2], [("i_1_1", "j_1_1"), ("i_1_1", "j_2_1"), ("i_1_2", "j_2_1")])
    assert LocalizationTree.from_json(t.to_json()) == t
    assert t.to_json()["edges"][0] == ["i_1_1", "j_1_1"]
    assert t.diagram() == "i_1_1 -> j_1_1, j_2_1\ni_1_2 -> j_2_1"


@pytest.mark.parametrize("a, b, expected", [(1, 4, 1), (2, 3, 12), (3, 3, 81)])
def test_census_small(a, b, expected):
    q = SupportQuiver.from_levels([1] * a, [1] * b)
    trees = list(enumerate_spanning_trees(q))
    assert len(trees) == len(set(trees)) == expected


@pytest.mark.parametrize("a, b, expected", [(2, 3, 12), (1, 1, 1), (4, 5, 32000)])
def test_cayley_count(a, b, expected):
    assert cayley_count(a, b) == expected


def test_census_matches_cayley_and_prufer():
    for a in range(1, 5):
        for b in range(1, 5):
            census = list(spanning_tree_masks(a, b))
            assert len(census) == len(set(census)) == cayley_count(a, b)
            assert set(census) == set(prufer_spanning_trees(a, b))


def test_prufer_roundtrip():
    for masks in spanning_tree_masks(3, 4):
        src, snk = prufer_encode(masks, 4)
        assert prufer_decode(3, 4, src, snk) == masks


def test_matrix_tree_cross_check():
    for src, snk in [([1, 1], [1, 2]), ([2, 1], [3]), ([1, 2, 3], [1, 1, 2]), ([1] * 3, [1] * 3)]:
        q = SupportQuiver.from_levels(src, snk)
        assert matrix_tree_weight(q) == sum(tree_weight_v(t) for t in enumerate_spanning_trees(q))


def test_stability_examples():
    good = make_tree([1, 1], [1, 1, 1], [("i_1_1", "j_1_1"), ("i_1_1", "j_1_2"), ("i_1_2", "j_1_2"), ("i_1_2", "j_1_3")])
    bad = make_tree([1, 1], [1, 1, 1], [("i_1_1", "j_1_1"), ("i_1_2", "j_1_1"), ("i_1_2", "j_1_2"), ("i_1_2", "j_1_3")])
    single = make_tree([2], [3], [("i_2_1", "j_3_1")])
    assert is_stable(good) and not is_stable(bad) and is_stable(single)


@pytest.mark.parametrize(
    "src, snk",
    [([1, 1], [1, 1, 1]), ([1, 1], [1, 2]), ([2], [1, 1, 1]), ([1, 1, 1], [1, 1, 1, 1]), ([1, 2], [1, 1, 1, 2]),
     ([1, 1, 2], [1, 1, 1, 1, 1]), ([3, 1], [2, 2, 1])],
)
def test_stability_filter_against_brute_force(src, snk):
    q = SupportQuiver.from_levels(src, snk)
    everything = list(enumerate_spanning_trees(q))
    brute = {t for t in everything if brute_stable(t)}
    assert {t for t in everything if is_stable(t)} == brute
    assert set(enumerate_spanning_trees(q, stable_only=True)) == brute


def test_flag_mode_agrees_with_is_stable():
    q = SupportQuiver.from_levels([1, 2, 1], [1, 1, 2, 1])
    for masks, weight, stable, mult in _iter_trees(q.source_levels, q.sink_levels, stability="flag"):
        t = LocalizationTree.from_masks(q, masks)
        assert mult == 1 and stable == is_stable(t) and weight == tree_weight_v(t)


def test_stable_sources_have_degree_k_plus_one():
    for a, k in itertools.product((1, 2, 3), (1, 2)):
        q = SupportQuiver.from_levels([1] * a, [1] * (k * a + 1))
        trees = list(enumerate_spanning_trees(q, stable_only=True))
        assert trees
        assert all(t.degree(s) == k + 1 for t in trees for s in q.source_labels)


def test_tree_weights():
    assert tree_weight_v(make_tree([1, 1], [1, 1, 1], [("i_1_1", "j_1_1"), ("i_1_1", "j_1_2"), ("i_1_2", "j_1_2"), ("i_1_2", "j_1_3")])) == 1
    edge = make_tree([2], [3], [("i_2_1", "j_3_1")])
    assert vertex_weight(edge, "i_2_1") == 3 and vertex_weight(edge, "j_3_1") == 2
    assert tree_weight_v(edge) == 6
    sample = make_tree([1, 1], [1, 2], [("i_1_1", "j_1_1"), ("i_1_1", "j_2_1"), ("i_1_2", "j_2_1")])
    assert tree_weight_v(sample) == 4


def test_weight_formulas_agree_everywhere():
    for src, snk in [([1, 2], [1, 3]), ([2, 2, 1], [1, 2]), ([1, 1, 3], [2, 1, 1])]:
        for t in enumerate_spanning_trees(SupportQuiver.from_levels(src, snk)):
            assert tree_weight_v(t) == tree_weight_edges(t)


def test_degree_product_bound():
    for m in (1, 3, 5):
        assert degree_product_bound(SupportQuiver.from_levels([1], [1]), m) == m
        assert degree_product_bound(SupportQuiver.from_levels([2], [3]), 3) == 18
        for a, b in [(2, 3), (3, 3), (3, 2)]:
            q = SupportQuiver.from_levels([1] * a, [1] * b)
            degrees = [b * m] * a + [a * m] * b
            assert degree_product_bound(q, m) == math.prod(degrees) // max(degrees)
            if a >= b:
                assert degree_product_bound(q, m) == (b * m) ** a * (a * m) ** (b - 1)
            assert cayley_count(a, b) * m ** (a + b - 1) <= degree_product_bound(q, m)


def test_degree_bound_dominates_all_trees():
    m = 3
    for src, snk in [([1, 2], [3]), ([1, 1], [1, 2]), ([2, 1, 1], [1, 1, 2])]:
        q = SupportQuiver.from_levels(src, snk)
        edges = len(src) + len(snk) - 1
        assert m**edges * matrix_tree_weight(q) <= degree_product_bound(q, m)


def test_automorphism_examples():
    edge = make_tree([1], [1], [("i_1_1", "j_1_1")])
    assert automorphism_weight(edge) == 1
    for k in range(1, 5):
        star = make_tree([1], [1] * (k + 1), [("i_1_1", f"j_1_{n}") for n in range(1, k + 2)])
        assert automorphism_weight(star) == Fraction(1, math.factorial(k + 1))
    path = make_tree([1, 1], [1, 1, 1], [("i_1_1", "j_1_1"), ("i_1_1", "j_1_2"), ("i_1_2", "j_1_2"), ("i_1_2", "j_1_3")])
    assert automorphism_weight(path) == Fraction(1, 2)


def test_automorphisms_against_networkx():
    rng = random.Random(3)
    for src, snk in [([1, 1, 1], [1, 1, 1, 1]), ([1, 2, 1], [1, 1, 2]), ([1, 1], [1, 1, 1, 1, 1]), ([2, 2], [1, 1, 1])]:
        trees = list(enumerate_spanning_trees(SupportQuiver.from_levels(src, snk)))
        for t in rng.sample(trees, min(25, len(trees))):
            assert automorphism_count(t) == nx_automorphisms(t)


def test_canonical_form_is_label_invariant():
    rng = random.Random(11)
    q = SupportQuiver.from_levels([1, 1, 2], [1, 1, 1, 2])
    trees = list(enumerate_spanning_trees(q))
    for t in rng.sample(trees, 40):
        relabelled = _permute_within_levels(t, rng)
        assert canonical_form(relabelled) == canonical_form(t)
        assert is_stable(relabelled) == is_stable(t)
        assert tree_weight_v(relabelled) == tree_weight_v(t)


def _permute_within_levels(t, rng):
    q = t.support
    mapping = {}
    for group in (q.sources, q.sinks):
        by_level = {}
        for s, l in group:
            by_level.setdefault(l, []).append(s)
        for labels in by_level.values():
            shuffled = labels[:]
            rng.shuffle(shuffled)
            mapping.update(zip(labels, shuffled))
    return LocalizationTree(q, frozenset((mapping[i], mapping[j]) for i, j in t.edges))


@pytest.mark.parametrize("a, k", [(2, 1), (3, 1), (2, 2)])
def test_orbit_sum_consistency(a, k):
    q = SupportQuiver.from_levels([1] * a, [1] * (k * a + 1))
    labelled = sum(1 for _ in enumerate_spanning_trees(q, stable_only=True))
    assert automorphism_weighted_sum(q) * math.factorial(a) * math.factorial(k * a + 1) == labelled


def test_orbit_sum_with_levels():
    pair = PartitionPair(WeightedPartition.parse("1*2+2*1"), WeightedPartition.parse("1*3+2*1"))
    q = SupportQuiver.from_pair(pair)
    labelled = sum(1 for _ in enumerate_spanning_trees(q, stable_only=True))
    group = math.prod(math.factorial(n) for _, n in pair.source.parts + pair.sink.parts)
    assert automorphism_weighted_sum(q) * group == labelled


@pytest.mark.parametrize(
    "src, snk",
    [([1, 1], [1, 1, 1]), ([1, 1, 1], [1] * 7), ([1, 2], [1, 1, 2, 3]), ([2, 1, 1], [1, 1, 1, 1, 1]), ([1, 1, 1, 1], [1] * 5)],
)
def test_census_modes_agree(src, snk):
    q = SupportQuiver.from_levels(src, snk)
    reference = [t for t in enumerate_spanning_trees(q) if is_stable(t)]
    expected = (len(reference), sum(tree_weight_v(t) for t in reference))
    for prune in (True, False):
        for reduce in (True, False):
            c = stable_census(q, prune=prune, reduce=reduce, use_cache=False)
            assert (c.count, c.weight_sum) == expected
            assert c.stats.stable == c.count <= c.stats.enumerated
    sharded = stable_census(q, workers=3, use_cache=False)
    assert (sharded.count, sharded.weight_sum) == expected


def test_census_cache_is_label_independent():
    a = stable_census(SupportQuiver.from_levels([2, 1], [1, 3]))
    b = stable_census(SupportQuiver.from_levels([1, 2], [3, 1]))
    assert a is b
