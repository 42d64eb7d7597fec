"""eFPGA selection: score valid fabrics, enumerate solutions, pick the final one.

A fabric's score rewards headroom relative to the most utilized fabric of
the run::

    T_f = alpha * (MaxIO - IO_f) / MaxIO + beta * (MaxCLB - CLB_f) / MaxCLB

Scores are kept as exact fractions so that ties and rescaling of
``(alpha, beta)`` never depend on floating-point rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from alice.errors import NoSolution
from alice.fabric import FabricImpl
from alice.hdl.hierarchy import related
from alice.params import RANK_MAX, RANK_MIN

Number = float | Fraction


def fabric_score(
    f: FabricImpl, max_io_util: Number, max_clb_util: Number, alpha: Number = 1, beta: Number = 1
) -> Fraction:
    io_max, clb_max = Fraction(max_io_util), Fraction(max_clb_util)
    if io_max <= 0 or clb_max <= 0:
        raise ValueError("utilization maxima must be positive")
    return (
        Fraction(alpha) * (io_max - f.io_util_exact) / io_max
        + Fraction(beta) * (clb_max - f.clb_util_exact) / clb_max
    )


def compute_scores(fabrics: Iterable[FabricImpl], alpha: Number = 1, beta: Number = 1) -> dict[str, Fraction]:
    """Score every fabric against the maxima of the given set, keyed by cluster key."""
    fabrics = list(fabrics)
    if not fabrics:
        return {}
    io_max = max(f.io_util_exact for f in fabrics)
    clb_max = max(f.clb_util_exact for f in fabrics)
    return {f.key: fabric_score(f, io_max, clb_max, alpha, beta) for f in fabrics}


@dataclass(frozen=True)
class Solution:
    fabrics: tuple[FabricImpl, ...]
    score: Fraction = Fraction(0)

    @property
    def keys(self) -> tuple[str, ...]:
        return tuple(sorted(f.key for f in self.fabrics))

    @property
    def redacted(self) -> int:
        return sum(len(f.cluster) for f in self.fabrics)

    @property
    def instances(self) -> list[str]:
        return sorted(m for f in self.fabrics for m in f.cluster.members)

    @property
    def sizes(self) -> list[str]:
        return [f.size for f in sorted(self.fabrics, key=lambda f: f.key)]

    def __len__(self) -> int:
        return len(self.fabrics)


def overlaps(a: FabricImpl, b: FabricImpl) -> bool:
    """True when the two fabrics would redact a shared instance.

    Redacting an instance removes its whole subtree, so a member nested
    inside another fabric's member counts as shared.
    """
    return any(related(x, y) for x in a.cluster.members for y in b.cluster.members)


def enumerate_solutions(
    fabrics: list[FabricImpl],
    max_efpgas: int,
    scores: Mapping[str, Fraction] | None = None,
) -> list[Solution]:
    """Every non-empty set of mutually non-overlapping fabrics, at most ``max_efpgas`` of them.

    Depth-first, index-ordered so each set is produced once; a branch is cut
    as soon as a fabric overlaps one already chosen or the count limit is hit.
    """
    if scores is None:
        scores = compute_scores(fabrics)
    n = len(fabrics)
    clash = [[overlaps(fabrics[i], fabrics[j]) for j in range(n)] for i in range(n)]
    out: list[Solution] = []

    def extend(chosen: list[int], start: int) -> None:
        for j in range(start, n):
            if any(clash[i][j] for i in chosen):
                continue
            chosen.append(j)
            picked = tuple(fabrics[i] for i in chosen)
            out.append(Solution(picked, sum((scores[f.key] for f in picked), Fraction(0))))
            if len(chosen) < max_efpgas:
                extend(chosen, j + 1)
            chosen.pop()

    extend([], 0)
    return out


def rank_key(solution: Solution, order: str = RANK_MAX) -> tuple:
    """Sort key; the smallest key is the best solution."""
    if order not in (RANK_MAX, RANK_MIN):
        raise ValueError(f"unknown rank order {order!r}")
    primary = -solution.score if order == RANK_MAX else solution.score
    return (primary, -solution.redacted, len(solution), solution.keys)


def rank_solutions(solutions: Iterable[Solution], order: str = RANK_MAX) -> Solution:
    solutions = list(solutions)
    if not solutions:
        raise NoSolution("no admissible combination of eFPGAs")
    return min(solutions, key=lambda s: rank_key(s, order))
