"""Cluster identification: every group of independent candidates that fits one eFPGA."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from alice.errors import ClusterLimitExceeded
from alice.hdl.hierarchy import InstanceTree, pin_count, related
from alice.hdl.model import Design
from alice.params import FlowParams


@dataclass(frozen=True)
class Cluster:
    members: frozenset[str]
    agg_pins: int

    @property
    def key(self) -> str:
        return "+".join(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)


def independent(a: str, b: str, tree: InstanceTree) -> bool:
    """True iff ``a`` and ``b`` are distinct and neither contains the other."""
    return tree.independent(a, b)


def cluster_pins(members: Iterable[str], design: Design, tree: InstanceTree) -> int:
    """Aggregate pin count; every instance counts separately, nothing is shared."""
    return sum(pin_count(design.modules[tree.module_of(m)]) for m in members)


def enumerate_clusters(
    candidates: Iterable[str], design: Design, tree: InstanceTree, params: FlowParams
) -> list[Cluster]:
    """Fixed-point recombination of candidate clusters.

    Starts from the singletons and repeatedly unions pairs of known clusters,
    keeping unions that are new, pairwise independent and within
    ``params.max_io``. Each round only pairs clusters found in the previous
    round against the whole set, which reaches the same fixed point as
    re-pairing everything. Returns clusters sorted by key.
    """
    members = sorted(set(candidates))
    pins = {m: pin_count(design.modules[tree.module_of(m)]) for m in members}
    conflicts = {m: frozenset(o for o in members if related(m, o)) for m in members}

    def admissible(group: frozenset[str], total: int) -> bool:
        return total <= params.max_io and all(
            not (conflicts[m] & group) - {m} for m in group
        )

    known: dict[frozenset[str], int] = {}
    for m in members:
        if pins[m] <= params.max_io:
            known[frozenset([m])] = pins[m]
    frontier = list(known)

    while frontier:
        found: dict[frozenset[str], int] = {}
        current = list(known)
        for c1 in frontier:
            for c2 in current:
                if c1 == c2:
                    continue
                union = c1 | c2
                if union in known or union in found:
                    continue
                total = sum(pins[m] for m in union)
                if admissible(union, total):
                    found[union] = total
        if len(known) + len(found) > params.max_clusters:
            raise ClusterLimitExceeded(
                f"more than {params.max_clusters} clusters; raise limits.max_clusters or tighten max_io"
            )
        known.update(found)
        frontier = list(found)

    clusters = [Cluster(group, total) for group, total in known.items()]
    clusters.sort(key=lambda c: (len(c), c.key))
    return clusters
