"""Levelled complete bipartite quivers, slope stability and Kronecker-quiver invariants."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .partitions import PartitionPair

DimVector = Mapping[str, int]


@dataclass(frozen=True)
class SupportQuiver:
    """Complete bipartite quiver with ``m * l(i) * l(j)`` arrows from source ``i`` to sink ``j``.

    ``sources`` and ``sinks`` are tuples of ``(label, level)``; ``m`` stays symbolic.
    """

    sources: tuple[tuple[str, int], ...]
    sinks: tuple[tuple[str, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple((str(s), int(l)) for s, l in self.sources))
        object.__setattr__(self, "sinks", tuple((str(s), int(l)) for s, l in self.sinks))
        labels = [s for s, _ in self.sources] + [s for s, _ in self.sinks]
        if len(set(labels)) != len(labels):
            raise ValueError("vertex labels must be unique")
        if any(l < 1 for _, l in self.sources + self.sinks):
            raise ValueError("levels must be positive")

    @classmethod
    def from_pair(cls, pair: PartitionPair) -> "SupportQuiver":
        """Sources ``i_l_k`` for ``k = 1..a_l`` and sinks ``j_l_k`` likewise."""
        sources = tuple((f"i_{l}_{k}", l) for l, n in pair.source.parts for k in range(1, n + 1))
        sinks = tuple((f"j_{l}_{k}", l) for l, n in pair.sink.parts for k in range(1, n + 1))
        return cls(sources, sinks)

    @classmethod
    def from_levels(cls, source_levels: Sequence[int], sink_levels: Sequence[int]) -> "SupportQuiver":
        sources, sinks, seen = [], [], {}
        for prefix, levels, out in (("i", source_levels, sources), ("j", sink_levels, sinks)):
            for l in levels:
                seen[(prefix, l)] = seen.get((prefix, l), 0) + 1
                out.append((f"{prefix}_{l}_{seen[(prefix, l)]}", l))
        return cls(tuple(sources), tuple(sinks))

    @property
    def source_labels(self) -> list[str]:
        return [s for s, _ in self.sources]

    @property
    def sink_labels(self) -> list[str]:
        return [s for s, _ in self.sinks]

    @property
    def source_levels(self) -> list[int]:
        return [l for _, l in self.sources]

    @property
    def sink_levels(self) -> list[int]:
        return [l for _, l in self.sinks]

    def level(self, label: str) -> int:
        return self.levels[label]

    @property
    def levels(self) -> dict[str, int]:
        return dict(self.sources + self.sinks)

    def is_source(self, label: str) -> bool:
        return label in dict(self.sources)

    def signature(self) -> tuple[tuple[int, ...], tuple[int, ...]]:
        """Sorted level multisets; labels do not matter for counting."""
        return tuple(sorted(self.source_levels)), tuple(sorted(self.sink_levels))

    def full_dimension(self) -> dict[str, int]:
        return {s: 1 for s in self.source_labels + self.sink_labels}

    def theta(self, d: DimVector) -> int:
        return sum(l * d.get(s, 0) for s, l in self.sources)

    def sink_weight(self, d: DimVector) -> int:
        return sum(l * d.get(s, 0) for s, l in self.sinks)

    def kappa(self, d: DimVector) -> int:
        return self.theta(d) + self.sink_weight(d)

    def to_json(self) -> dict:
        return {
            "sources": [{"label": s, "level": l} for s, l in self.sources],
            "sinks": [{"label": s, "level": l} for s, l in self.sinks],
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "SupportQuiver":
        return cls(
            tuple((v["label"], v["level"]) for v in doc["sources"]),
            tuple((v["label"], v["level"]) for v in doc["sinks"]),
        )


def slope(d: DimVector, q: SupportQuiver) -> Fraction:
    kappa = q.kappa(d)
    if kappa == 0:
        raise ValueError("slope undefined for a dimension vector of zero total weight")
    return Fraction(q.theta(d), kappa)


def king_theta(d: DimVector, e: DimVector, q: SupportQuiver, m: int) -> int:
    """King's linear form ``<e,d> - <d,e>`` for the quiver with ``m*l(i)*l(j)`` arrows.

    Positive exactly when ``slope(e) < slope(d)``.
    """
    return m * (q.theta(d) * q.sink_weight(e) - q.theta(e) * q.sink_weight(d))


def euler_form(d: Sequence[int], e: Sequence[int], m: int) -> int:
    """Euler form of the Kronecker quiver ``K(m)`` on ``(source, sink)`` dimension vectors."""
    return d[0] * e[0] + d[1] * e[1] - m * d[0] * e[1]


def is_imaginary_schur_root(a: int, b: int, m: int) -> bool:
    """``(m - sqrt(m^2-4))/2 < b/a < (m + sqrt(m^2-4))/2``, i.e. ``a^2 + b^2 < m*a*b``."""
    if m < 3:
        raise ValueError(f"need m >= 3, got {m}")
    return a * a + b * b < m * a * b


def moduli_dimension(a: int, b: int, m: int) -> int:
    return 1 - euler_form((a, b), (a, b), m)


def dualities(a: int, b: int, m: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Transpose image ``(b, a)`` and reflection image ``(a, m*a - b)``."""
    if b < 0 or m * a - b < 0:
        raise ValueError(f"reflection of ({a},{b}) at m={m} leaves the positive cone")
    return (b, a), (a, m * a - b)


def is_theta_coprime(a: int, b: int) -> bool:
    if a < 1 or b < 1:
        raise ValueError("dimension vector entries must be positive")
    return math.gcd(a, b) == 1


def has_slope_collision(q: SupportQuiver) -> bool:
    """True if some proper ``0 != e < d`` (``d`` all-ones) has the slope of ``d``.

    Source subsets are enumerated explicitly; sink subsets are handled by a subset-sum table.
    """
    theta_tot = sum(q.source_levels)
    sink_tot = sum(q.sink_levels)
    reachable = {0: 1}
    for l in q.sink_levels:
        nxt = dict(reachable)
        for s, c in reachable.items():
            nxt[s + l] = nxt.get(s + l, 0) + c
        reachable = nxt
    levels = q.source_levels
    n = len(levels)
    for mask in range(1 << n):
        theta = sum(levels[i] for i in range(n) if mask >> i & 1)
        if theta == 0:
            continue
        # theta/(theta+sink) = theta_tot/(theta_tot+sink_tot)
        num = theta * sink_tot
        if num % theta_tot:
            continue
        target = num // theta_tot
        ways = reachable.get(target, 0)
        if mask == (1 << n) - 1 and target == sink_tot:
            ways -= 1
        if ways > 0:
            return True
    return False
