"""Spanning trees of levelled complete bipartite quivers and the stability filter on them.

A stable spanning tree (all dimensions one, all arrows nonzero) is a localization data whose
moduli space is a point. Trees are represented internally as a tuple of sink bitmasks, one per
source, which is all the information a bipartite tree carries.
"""
from __future__ import annotations

import itertools
import math
import os
import threading
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

from .quiver import SupportQuiver

Masks = tuple[int, ...]


@dataclass(frozen=True)
class LocalizationTree:
    """A spanning tree of ``support`` given by its ``(source, sink)`` edges."""

    support: SupportQuiver
    edges: frozenset[tuple[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "edges", frozenset((str(i), str(j)) for i, j in self.edges))
        sources = set(self.support.source_labels)
        sinks = set(self.support.sink_labels)
        for i, j in self.edges:
            if i not in sources or j not in sinks:
                raise ValueError(f"edge ({i}, {j}) is not a source-sink pair of the support")
        n = len(sources) + len(sinks)
        if len(self.edges) != n - 1:
            raise ValueError(f"a spanning tree on {n} vertices needs {n - 1} edges, got {len(self.edges)}")
        parent = {v: v for v in sources | sinks}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for i, j in self.edges:
            ri, rj = find(i), find(j)
            if ri == rj:
                raise ValueError("edges contain a cycle")
            parent[ri] = rj

    @classmethod
    def from_masks(cls, support: SupportQuiver, masks: Masks) -> "LocalizationTree":
        sinks = support.sink_labels
        edges = [
            (src, sinks[j])
            for src, mask in zip(support.source_labels, masks)
            for j in range(len(sinks))
            if mask >> j & 1
        ]
        return cls(support, frozenset(edges))

    def masks(self) -> Masks:
        index = {s: j for j, s in enumerate(self.support.sink_labels)}
        out = dict.fromkeys(self.support.source_labels, 0)
        for i, j in self.edges:
            out[i] |= 1 << index[j]
        return tuple(out[s] for s in self.support.source_labels)

    def neighbours(self, label: str) -> list[str]:
        out = [j for i, j in self.edges if i == label] + [i for i, j in self.edges if j == label]
        return sorted(out)

    def degree(self, label: str) -> int:
        return sum(label in e for e in self.edges)

    def sorted_edges(self) -> list[tuple[str, str]]:
        order = {s: k for k, s in enumerate(self.support.source_labels + self.support.sink_labels)}
        return sorted(self.edges, key=lambda e: (order[e[0]], order[e[1]]))

    def to_json(self) -> dict:
        return {"support": self.support.to_json(), "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_json(cls, doc: Mapping) -> "LocalizationTree":
        return cls(SupportQuiver.from_json(doc["support"]), frozenset(tuple(e) for e in doc["edges"]))

    def diagram(self) -> str:
        """One line per source listing the sinks it points to."""
        lines = []
        for src in self.support.source_labels:
            nbrs = [j for j in self.support.sink_labels if (src, j) in self.edges]
            lines.append(f"{src} -> {', '.join(nbrs)}")
        return "\n".join(lines)


def cayley_count(a: int, b: int) -> int:
    """Number of spanning trees of ``K_{a,b}``: ``a^(b-1) * b^(a-1)``."""
    if a < 1 or b < 1:
        raise ValueError("both sides must be non-empty")
    return a ** (b - 1) * b ** (a - 1)


def _sink_weight(levels: Sequence[int], mask: int) -> int:
    total, j = 0, 0
    while mask:
        if mask & 1:
            total += levels[j]
        mask >>= 1
        j += 1
    return total


@dataclass
class CensusStats:
    """``enumerated`` and ``stable`` count labeled trees; ``visited`` counts generated leaves.

    They differ only when fresh-sink symmetry reduction is on, where one visited leaf stands for
    a whole orbit of labeled trees.
    """

    enumerated: int = 0
    stable: int = 0
    pruned: int = 0
    visited: int = 0

    def __iadd__(self, other: "CensusStats") -> "CensusStats":
        self.enumerated += other.enumerated
        self.stable += other.stable
        self.pruned += other.pruned
        self.visited += other.visited
        return self

    def as_dict(self) -> dict:
        return {
            "enumerated": self.enumerated,
            "stable": self.stable,
            "pruned": self.pruned,
            "visited": self.visited,
        }


def _iter_trees(
    source_levels: Sequence[int],
    sink_levels: Sequence[int],
    *,
    stability: str = "prune",
    reduce: bool = False,
    first: tuple[int, int] | None = None,
    stats: CensusStats | None = None,
    max_depth: int | None = None,
) -> Iterator[tuple[Masks, int, bool, int]]:
    """Yield ``(masks, v_weight, stable, multiplicity)`` for spanning trees of the levelled ``K_{a,b}``.

    Sources are placed in order; each picks one sink from every component it joins, so every
    partial choice extends to at least one tree. ``stability`` is ``"prune"`` (drop branches as
    soon as a closed source set is destabilizing, yield only stable trees), ``"flag"`` (yield all
    trees with their verdict) or ``"off"``.

    With ``reduce`` the sinks no source has touched yet are treated as interchangeable within
    their level: a source taking ``k`` of ``u`` such sinks takes the lowest-indexed ones and the
    leaf carries the multiplicity ``C(u, k)``. Without it every labeled tree is yielded once with
    multiplicity 1. ``first`` pins the first source's ``(mask, multiplicity)``; ``max_depth``
    stops after that many sources and yields the partial choices, uncounted.
    """
    a, b = len(source_levels), len(sink_levels)
    if a == 0 or b == 0:
        raise ValueError("support quiver needs at least one source and one sink")
    theta_tot = sum(source_levels)
    kappa_tot = theta_tot + sum(sink_levels)
    track = stability != "off"
    prune = stability == "prune"
    stats = stats if stats is not None else CensusStats()
    weight_cache: dict[int, int] = {}
    masks: list[int] = [0] * a
    sink_level_set = sorted(set(sink_levels))

    def sink_weight(mask: int) -> int:
        w = weight_cache.get(mask)
        if w is None:
            w = weight_cache[mask] = _sink_weight(sink_levels, mask)
        return w

    def place(idx: int, mask: int, subsets: list[tuple[int, int]]) -> tuple[bool, list[tuple[int, int]]]:
        """Return (stable so far, extended subset table) after fixing source ``idx``."""
        level = source_levels[idx]
        new = []
        ok = True
        last = idx == a - 1
        for k, (th, nm) in enumerate(subsets):
            th2, nm2 = th + level, nm | mask
            new.append((th2, nm2))
            # k == len-1 is the subset of all placed sources; at the last source it is the full vertex set
            if last and k == len(subsets) - 1:
                continue
            if th2 * kappa_tot >= theta_tot * (th2 + sink_weight(nm2)):
                ok = False
                if prune:
                    return False, subsets
        return ok, subsets + new

    def choices(idx: int, comp: list[int], touched: int) -> Iterator[tuple[int, int]]:
        groups: dict[int, list[int]] = {}
        fresh: dict[int, list[int]] = {l: [] for l in sink_level_set}
        for j, c in enumerate(comp):
            if reduce and not touched >> j & 1:
                fresh[sink_levels[j]].append(j)
            else:
                groups.setdefault(c, []).append(j)
        comps = list(groups.values())
        last = idx == a - 1
        if last:
            comp_sets: Iterable[tuple[list[int], ...]] = [tuple(comps)]
        else:
            comp_sets = [
                tuple(comps[t] for t in range(len(comps)) if sel >> t & 1) for sel in range(1 << len(comps))
            ]
        if last:
            fresh_options = [[(len(js), 1, js) for js in fresh.values()]]
        else:
            fresh_options = [
                [(k, math.comb(len(js), k), js[:k]) for k in range(len(js) + 1)] for js in fresh.values()
            ]
            fresh_options = list(itertools.product(*fresh_options)) if fresh_options else [()]
        if last:
            fresh_options = [tuple(fresh_options[0])]
        for chosen in comp_sets:
            for pick in itertools.product(*chosen):
                base = 0
                for j in pick:
                    base |= 1 << j
                for combo in fresh_options:
                    mask, mult = base, 1
                    for _, c, js in combo:
                        mult *= c
                        for j in js:
                            mask |= 1 << j
                    if mask:
                        yield mask, mult

    def merge(comp: list[int], mask: int) -> list[int]:
        hit = {comp[j] for j in range(b) if mask >> j & 1}
        target = min(hit)
        return [target if c in hit else c for c in comp]

    def rec(idx, comp, touched, subsets, weight, stable, mult) -> Iterator[tuple[Masks, int, bool, int]]:
        if idx == max_depth:
            yield tuple(masks[:idx]), weight, stable, mult
            return
        if idx == a:
            stats.visited += 1
            stats.enumerated += mult
            if stable:
                stats.stable += mult
            yield tuple(masks), weight, stable, mult
            return
        level = source_levels[idx]
        if idx == 0 and first is not None:
            options: Iterable[tuple[int, int]] = [first]
        else:
            options = choices(idx, comp, touched)
        for mask, factor in options:
            if track:
                ok, sub2 = place(idx, mask, subsets)
                if prune and not ok:
                    stats.pruned += 1
                    continue
            else:
                ok, sub2 = True, subsets
            w = weight * level ** bin(mask).count("1")
            j, mm = 0, mask
            while mm:
                if mm & 1:
                    w *= sink_levels[j]
                mm >>= 1
                j += 1
            masks[idx] = mask
            yield from rec(idx + 1, merge(comp, mask), touched | mask, sub2, w, stable and ok, mult * factor)

    yield from rec(0, list(range(b)), 0, [(0, 0)], 1, True, 1)


def enumerate_spanning_trees(q: SupportQuiver, stable_only: bool = False) -> Iterator[LocalizationTree]:
    """Every spanning tree of the complete bipartite support, each exactly once.

    With ``stable_only`` the stability prune is active and only localization data are yielded.
    """
    mode = "prune" if stable_only else "off"
    for masks, _, _, _ in _iter_trees(q.source_levels, q.sink_levels, stability=mode):
        yield LocalizationTree.from_masks(q, masks)


def spanning_tree_masks(a: int, b: int) -> Iterator[Masks]:
    """Raw backtracking census of ``K_{a,b}`` with trivial levels."""
    for masks, _, _, _ in _iter_trees([1] * a, [1] * b, stability="off"):
        yield masks


# -- Prüfer-style oracle -------------------------------------------------------------


def prufer_decode(a: int, b: int, source_seq: Sequence[int], sink_seq: Sequence[int]) -> Masks:
    """Decode a split Prüfer code of ``K_{a,b}``.

    ``source_seq`` (length ``b-1``) lists the source neighbour of each removed sink and
    ``sink_seq`` (length ``a-1``) the sink neighbour of each removed source, in removal order,
    where the smallest remaining leaf is removed first (sources precede sinks).
    """
    if len(source_seq) != b - 1 or len(sink_seq) != a - 1:
        raise ValueError("sequence lengths must be b-1 and a-1")
    n = a + b
    count = [0] * n
    for s in source_seq:
        count[s] += 1
    for t in sink_seq:
        count[a + t] += 1
    removed = [False] * n
    p = q = 0
    masks = [0] * a
    for _ in range(n - 2):
        x = next(v for v in range(n) if not removed[v] and count[v] == 0)
        if x >= a:
            y = source_seq[p]
            p += 1
            masks[y] |= 1 << (x - a)
            count[y] -= 1
        else:
            y = sink_seq[q]
            q += 1
            masks[x] |= 1 << y
            count[a + y] -= 1
        removed[x] = True
    u, w = (v for v in range(n) if not removed[v])
    if not u < a <= w:
        raise ValueError("code does not describe a bipartite tree")
    masks[u] |= 1 << (w - a)
    return tuple(masks)


def prufer_encode(masks: Masks, b: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    a = len(masks)
    n = a + b
    adj: list[set[int]] = [set() for _ in range(n)]
    for i, mask in enumerate(masks):
        for j in range(b):
            if mask >> j & 1:
                adj[i].add(a + j)
                adj[a + j].add(i)
    source_seq, sink_seq = [], []
    for _ in range(n - 2):
        x = min(v for v in range(n) if len(adj[v]) == 1)
        (y,) = adj[x]
        (source_seq if x >= a else sink_seq).append(y if x >= a else y - a)
        adj[y].discard(x)
        adj[x].clear()
    return tuple(source_seq), tuple(sink_seq)


def prufer_spanning_trees(a: int, b: int) -> Iterator[Masks]:
    for src in itertools.product(range(a), repeat=b - 1):
        for snk in itertools.product(range(b), repeat=a - 1):
            yield prufer_decode(a, b, src, snk)


def matrix_tree_weight(q: SupportQuiver) -> Fraction:
    """Sum over all spanning trees of the product of edge weights ``l(i)*l(j)`` (Kirchhoff)."""
    levels = q.source_levels + q.sink_levels
    a = len(q.sources)
    n = len(levels)
    lap = [[Fraction(0)] * n for _ in range(n)]
    for i in range(a):
        for j in range(a, n):
            w = levels[i] * levels[j]
            lap[i][j] -= w
            lap[j][i] -= w
            lap[i][i] += w
            lap[j][j] += w
    mat = [row[1:] for row in lap[1:]]
    det = Fraction(1)
    size = n - 1
    for col in range(size):
        pivot = next((r for r in range(col, size) if mat[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            mat[col], mat[pivot] = mat[pivot], mat[col]
            det = -det
        det *= mat[col][col]
        for r in range(col + 1, size):
            f = mat[r][col] / mat[col][col]
            if f:
                for c in range(col, size):
                    mat[r][c] -= f * mat[col][c]
    return det


# -- stability and weights -----------------------------------------------------------


def is_stable(t: LocalizationTree) -> bool:
    """Check every source set ``T`` whose closure ``T + N(T)`` is a proper vertex subset.

    For an all-ones representation of a tree with nonzero maps, subrepresentations are the vertex
    sets closed under arrows. Extra sinks only lower the slope and sink-only sets have slope 0, so
    the closures of source sets are the only candidates that can destabilize.
    """
    q = t.support
    levels = q.levels
    theta_tot = sum(q.source_levels)
    kappa_tot = theta_tot + sum(q.sink_levels)
    nbrs = {s: {j for i, j in t.edges if i == s} for s in q.source_labels}
    sources = q.source_labels
    n_sinks = len(q.sinks)
    for r in range(1, len(sources) + 1):
        for subset in itertools.combinations(sources, r):
            closure = set().union(*(nbrs[s] for s in subset))
            if r == len(sources) and len(closure) == n_sinks:
                continue
            theta = sum(levels[s] for s in subset)
            kappa = theta + sum(levels[j] for j in closure)
            if theta * kappa_tot >= theta_tot * kappa:
                return False
    return True


def vertex_weight(t: LocalizationTree, label: str) -> int:
    """``v(q)``: product of the levels of the neighbours of ``q``."""
    levels = t.support.levels
    return math.prod(levels[n] for n in t.neighbours(label))


def tree_weight_v(t: LocalizationTree) -> int:
    """``prod_q v(q)``; the number of arrow colourings is ``m^(#edges)`` times this."""
    q = t.support
    return math.prod(vertex_weight(t, s) for s in q.source_labels + q.sink_labels)


def tree_weight_edges(t: LocalizationTree) -> int:
    levels = t.support.levels
    return math.prod(levels[i] * levels[j] for i, j in t.edges)


def degree_product_bound(q: SupportQuiver, m: int) -> int:
    """Degree product of the multigraph ``Q(partition)`` with one maximal-degree vertex omitted.

    A source of level ``l`` has degree ``l*b*m`` and a sink of level ``l`` has degree ``l*a*m``,
    with ``a``, ``b`` the weighted totals. On ties a sink is omitted.
    """
    a, b = sum(q.source_levels), sum(q.sink_levels)
    degrees = [l * b * m for l in q.source_levels] + [l * a * m for l in q.sink_levels]
    # reversed so that max() prefers the last sink on ties
    drop = len(degrees) - 1 - max(range(len(degrees)), key=lambda k: degrees[len(degrees) - 1 - k])
    return math.prod(d for k, d in enumerate(degrees) if k != drop)


# -- automorphisms -------------------------------------------------------------------


def _adjacency(t: LocalizationTree) -> tuple[list[str], dict[str, list[str]], dict[str, tuple[int, int]]]:
    q = t.support
    verts = q.source_labels + q.sink_labels
    adj: dict[str, list[str]] = {v: [] for v in verts}
    for i, j in t.edges:
        adj[i].append(j)
        adj[j].append(i)
    colour = {s: (0, l) for s, l in q.sources}
    colour.update({s: (1, l) for s, l in q.sinks})
    return verts, adj, colour


def _centres(verts: list[str], adj: dict[str, list[str]]) -> list[str]:
    if len(verts) <= 2:
        return list(verts)
    deg = {v: len(adj[v]) for v in verts}
    leaves = [v for v in verts if deg[v] <= 1]
    remaining = len(verts)
    while remaining > 2:
        remaining -= len(leaves)
        nxt = []
        for u in leaves:
            for w in adj[u]:
                deg[w] -= 1
                if deg[w] == 1:
                    nxt.append(w)
            deg[u] = 0
        leaves = nxt
    return leaves


def _rooted(v: str, parent: str | None, adj, colour) -> tuple[tuple, int]:
    """AHU code of the subtree at ``v`` and the order of its automorphism group fixing ``v``."""
    kids = [_rooted(w, v, adj, colour) for w in adj[v] if w != parent]
    kids.sort(key=lambda x: x[0])
    aut = 1
    for code, group in itertools.groupby(kids, key=lambda x: x[0]):
        group = list(group)
        aut *= math.factorial(len(group))
        for _, sub in group:
            aut *= sub
    return (colour[v], tuple(code for code, _ in kids)), aut


def _canonical(t: LocalizationTree) -> tuple[tuple, int]:
    verts, adj, colour = _adjacency(t)
    centres = _centres(verts, adj)
    if len(centres) == 1:
        return _rooted(centres[0], None, adj, colour)
    u, w = centres
    cu, au = _rooted(u, w, adj, colour)
    cw, aw = _rooted(w, u, adj, colour)
    # the two centres lie on opposite sides, so they are never swapped
    return tuple(sorted((cu, cw))), au * aw


def canonical_form(t: LocalizationTree) -> tuple:
    """Invariant of the unlabeled levelled tree (labels forgotten, sides and levels kept)."""
    return _canonical(t)[0]


def automorphism_count(t: LocalizationTree) -> int:
    return _canonical(t)[1]


def automorphism_weight(t: LocalizationTree) -> Fraction:
    """``1/|Aut|`` over side- and level-preserving automorphisms of the unlabeled tree."""
    return Fraction(1, automorphism_count(t))


def unlabeled_stable_shapes(q: SupportQuiver) -> dict[tuple, LocalizationTree]:
    """One representative per isomorphism class of stable trees on ``q``."""
    shapes: dict[tuple, LocalizationTree] = {}
    for t in enumerate_spanning_trees(q, stable_only=True):
        shapes.setdefault(canonical_form(t), t)
    return shapes


def automorphism_weighted_sum(q: SupportQuiver) -> Fraction:
    return sum((automorphism_weight(t) for t in unlabeled_stable_shapes(q).values()), Fraction(0))


# -- memoized stable census ----------------------------------------------------------


@dataclass(frozen=True)
class Census:
    """Stable labeled trees on a support signature: their number and total ``v``-weight."""

    count: int
    weight_sum: int
    stats: CensusStats = field(compare=False)


def _census_shard(source_levels, sink_levels, prune, reduce, first) -> tuple[int, int, CensusStats]:
    stats = CensusStats()
    count = weight = 0
    mode = "prune" if prune else "flag"
    trees = _iter_trees(source_levels, sink_levels, stability=mode, reduce=reduce, first=first, stats=stats)
    for _, w, stable, mult in trees:
        if stable:
            count += mult
            weight += mult * w
    return count, weight, stats


def _first_choices(source_levels, sink_levels, reduce: bool) -> list[tuple[int, int]]:
    """Shards: the possible ``(mask, multiplicity)`` choices of the first source."""
    return [
        (masks[0], mult)
        for masks, _, _, mult in _iter_trees(source_levels, sink_levels, stability="off", reduce=reduce, max_depth=1)
    ]


_CACHE: dict[tuple, Census] = {}
_CACHE_LOCK = threading.Lock()


def default_workers() -> int:
    env = os.environ.get("KRONCHI_WORKERS")
    return max(1, int(env)) if env else 1


def stable_census(
    q: SupportQuiver,
    *,
    workers: int | None = None,
    prune: bool = True,
    reduce: bool = True,
    use_cache: bool = True,
) -> Census:
    """Count stable labeled spanning trees of ``q`` and sum their ``v``-weights.

    The result only depends on the level multisets, so it is cached on ``q.signature()``.
    With ``workers > 1`` the census is sharded on the first source's neighbour set.
    ``prune`` and ``reduce`` only change the work done, never the result.
    """
    src, snk = q.signature()
    key = (src, snk, prune, reduce)
    if use_cache:
        with _CACHE_LOCK:
            hit = _CACHE.get(key)
        if hit is not None:
            return hit
    workers = default_workers() if workers is None else workers
    total = CensusStats()
    count = weight = 0
    if workers > 1 and len(src) > 1:
        firsts = _first_choices(src, snk, reduce)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_census_shard, src, snk, prune, reduce, f) for f in firsts]
            parts = [f.result() for f in futures]
    else:
        parts = [_census_shard(src, snk, prune, reduce, None)]
    for c, w, st in parts:
        count += c
        weight += w
        total += st
    result = Census(count, weight, total)
    if use_cache:
        with _CACHE_LOCK:
            _CACHE.setdefault(key, result)
    return result


def clear_cache() -> None:
    with _CACHE_LOCK:
        _CACHE.clear()
