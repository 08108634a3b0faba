"""Refining localization data: split a level-``k`` source into sources of levels 1 and ``k-1``.

The level-1 source takes the sinks ``J1 = {j_1..j_t}`` and the level-``(k-1)`` source takes
``J2 = {j_t..j_s}``; they share ``j_t``. The total slope is unchanged and, for a suitable
decomposition, the result is again stable. Iterating reaches the trivial source partition.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .partitions import WeightedPartition
from .quiver import SupportQuiver
from .trees import LocalizationTree, is_stable


@dataclass(frozen=True)
class SplitMove:
    source: str
    order: tuple[str, ...]
    t: int

    @property
    def j1(self) -> tuple[str, ...]:
        return self.order[: self.t]

    @property
    def j2(self) -> tuple[str, ...]:
        return self.order[self.t - 1 :]

    @property
    def shared(self) -> str:
        return self.order[self.t - 1]

    def to_json(self) -> dict:
        return {"source": self.source, "order": list(self.order), "t": self.t}

    @classmethod
    def from_json(cls, doc) -> "SplitMove":
        return cls(doc["source"], tuple(doc["order"]), int(doc["t"]))


def refine_partition_at(p: WeightedPartition, k: int) -> WeightedPartition:
    """Replace one part ``k`` by parts ``1`` and ``k-1`` (for ``k = 2`` that is two parts ``1``)."""
    if k < 2:
        raise ValueError(f"can only split parts of size >= 2, got {k}")
    counts = p.as_dict()
    if counts.get(k, 0) < 1:
        raise ValueError(f"partition {p} has no part of size {k}")
    counts[k] -= 1
    counts[1] = counts.get(1, 0) + 1
    counts[k - 1] = counts.get(k - 1, 0) + 1
    return WeightedPartition.from_mapping(counts)


def inequalities_hold(move: SplitMove, levels: dict[str, int], k: int) -> bool:
    """``(k-1) * sum(l) <= k * sum_{J2} l`` and ``sum(l) <= k * sum_{J1} l``."""
    total = sum(levels[j] for j in move.order)
    return (k - 1) * total <= k * sum(levels[j] for j in move.j2) and total <= k * sum(
        levels[j] for j in move.j1
    )


def canonicalize_sources(t: LocalizationTree) -> LocalizationTree:
    """Relabel sources ``i_l_1, i_l_2, ...`` within each level by their sorted sink neighbourhoods.

    Sink labels are kept. Two trees differing only by a permutation of same-level sources
    become equal.
    """
    q = t.support
    sink_pos = {s: n for n, s in enumerate(q.sink_labels)}
    nbrs = {s: tuple(sorted(sink_pos[j] for i, j in t.edges if i == s)) for s in q.source_labels}
    ordered = sorted(q.sources, key=lambda sl: (sl[1], nbrs[sl[0]]))
    rename, counter, sources = {}, {}, []
    for label, level in ordered:
        counter[level] = counter.get(level, 0) + 1
        rename[label] = f"i_{level}_{counter[level]}"
        sources.append((rename[label], level))
    support = SupportQuiver(tuple(sources), q.sinks)
    return LocalizationTree(support, frozenset((rename[i], j) for i, j in t.edges))


def _raw_split(t: LocalizationTree, move: SplitMove) -> LocalizationTree:
    q = t.support
    k = q.level(move.source)
    one, rest = f"{move.source}#first", f"{move.source}#rest"
    sources = tuple(s for s in q.sources if s[0] != move.source) + ((one, 1), (rest, k - 1))
    edges = {e for e in t.edges if e[0] != move.source}
    edges |= {(one, j) for j in move.j1} | {(rest, j) for j in move.j2}
    return canonicalize_sources(LocalizationTree(SupportQuiver(sources, q.sinks), frozenset(edges)))


def candidate_moves(t: LocalizationTree, source: str) -> Iterator[SplitMove]:
    """Every decomposition of the neighbourhood into ``J1``, ``J2`` overlapping in one sink."""
    nbrs = sorted((j for i, j in t.edges if i == source), key=t.support.sink_labels.index)
    for shared in nbrs:
        others = [j for j in nbrs if j != shared]
        for r in range(len(others) + 1):
            for left in itertools.combinations(others, r):
                right = [j for j in others if j not in left]
                yield SplitMove(source, tuple(left) + (shared,) + tuple(right), len(left) + 1)


def find_valid_splits(t: LocalizationTree, source: str) -> list[SplitMove]:
    """Moves satisfying both split inequalities whose result is a stable tree."""
    q = t.support
    k = q.level(source)
    if not q.is_source(source):
        raise ValueError(f"{source} is not a source")
    if k < 2:
        raise ValueError(f"source {source} has level 1 and cannot be split")
    levels = q.levels
    feasible = [mv for mv in candidate_moves(t, source) if inequalities_hold(mv, levels, k)]
    if not feasible:
        raise RuntimeError(f"no decomposition satisfies the split inequalities at {source}")
    return [mv for mv in feasible if is_stable(_raw_split(t, mv))]


def apply_split(t: LocalizationTree, move: SplitMove) -> LocalizationTree:
    """Split ``move.source``; the result has canonical source labels (see ``canonicalize_sources``)."""
    q = t.support
    if not q.is_source(move.source) or q.level(move.source) < 2:
        raise ValueError(f"{move.source} is not a source of level >= 2")
    nbrs = {j for i, j in t.edges if i == move.source}
    if set(move.order) != nbrs or len(move.order) != len(nbrs) or not 1 <= move.t <= len(move.order):
        raise ValueError("move does not decompose the neighbourhood of its source")
    if not inequalities_hold(move, q.levels, q.level(move.source)):
        raise ValueError("move violates the split inequalities")
    out = _raw_split(t, move)
    if not is_stable(out):
        raise ValueError("move does not produce a stable tree")
    return out


def source_partition(t: LocalizationTree) -> WeightedPartition:
    return WeightedPartition.from_sizes(t.support.source_levels)


def _splittable(t: LocalizationTree) -> list[str]:
    return [s for s, l in t.support.sources if l >= 2]


@lru_cache(maxsize=4096)
def _reachable(t: LocalizationTree) -> frozenset[LocalizationTree]:
    sources = _splittable(t)
    if not sources:
        return frozenset([t])
    out: set[LocalizationTree] = set()
    for s in sources:
        for mv in find_valid_splits(t, s):
            out |= _reachable(apply_split(t, mv))
    return frozenset(out)


def _key(t: LocalizationTree):
    return (t.support.sources, t.support.sinks, tuple(t.sorted_edges()))


def refine_to_trivial(t: LocalizationTree) -> list[LocalizationTree]:
    """All trees with only level-1 sources reachable from ``t`` by chains of valid splits.

    Sinks are never split. Results are deduplicated and sorted.
    """
    if not is_stable(t):
        raise ValueError("refinement starts from a stable tree")
    return sorted(_reachable(canonicalize_sources(t)), key=_key)


def refinement_fibres(trees) -> dict[LocalizationTree, list[LocalizationTree]]:
    """Map each reachable trivial-partition tree to the starting trees that reach it."""
    fibres: dict[LocalizationTree, list[LocalizationTree]] = {}
    for start in trees:
        for target in refine_to_trivial(start):
            fibres.setdefault(target, []).append(start)
    return fibres


def split_chains(t: LocalizationTree, limit: int = 1000) -> list[list[tuple[SplitMove, LocalizationTree]]]:
    """Depth-first chains of ``(move, result)`` steps ending at the trivial source partition.

    At each step the first splittable source (in label order) is refined. At most ``limit``
    chains are returned.
    """
    chains: list[list[tuple[SplitMove, LocalizationTree]]] = []

    def walk(tree, trail):
        if len(chains) >= limit:
            return
        sources = _splittable(tree)
        if not sources:
            chains.append(list(trail))
            return
        for mv in find_valid_splits(tree, sources[0]):
            nxt = apply_split(tree, mv)
            trail.append((mv, nxt))
            walk(nxt, trail)
            trail.pop()

    walk(canonicalize_sources(t), [])
    return chains
