"""Module filtering: pick candidate redaction instances.

Instances are scored by the number of selected outputs they affect, the
most relevant ones are kept, and those that cannot fit the eFPGA I/O budget
are dropped.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from alice.dataflow import DataflowGraph, affecting_instances
from alice.errors import EmptyCandidateSet
from alice.hdl.hierarchy import InstanceTree, pin_count
from alice.hdl.model import Design
from alice.params import POSITIVE_SCORE, TRANSITIVE, FlowParams, SelectPolicy


def score_instances(
    graph: DataflowGraph, outputs: Iterable[str], impact: str = TRANSITIVE
) -> dict[str, int]:
    """Number of ``outputs`` each instance affects (top excluded)."""
    scores = {path: 0 for path in graph.tree.instances()}
    for output in dict.fromkeys(outputs):
        for path in affecting_instances(graph, output, impact):
            scores[path] += 1
    return scores


def rank_and_select(scores: Mapping[str, int], policy: SelectPolicy = SelectPolicy()) -> set[str]:
    """Functionally relevant instances.

    Zero-score instances never qualify. ``top_k`` keeps the ``k`` best by
    (score desc, path asc) plus anything tied with the k-th score.
    """
    positive = {path: s for path, s in scores.items() if s >= 1}
    if policy.kind == POSITIVE_SCORE:
        return set(positive)
    ranked = sorted(positive, key=lambda p: (-positive[p], p))
    if len(ranked) <= policy.k:
        return set(ranked)
    cutoff = positive[ranked[policy.k - 1]]
    return {p for p in ranked if positive[p] >= cutoff}


def structural_filter(
    candidates: Iterable[str], design: Design, tree: InstanceTree, params: FlowParams
) -> set[str]:
    """Keep candidates whose module fits ``params.max_io`` pins.

    Candidates related by hierarchy are all kept; clustering keeps them apart.
    """
    kept = {
        path for path in candidates
        if pin_count(design.modules[tree.module_of(path)]) <= params.max_io
    }
    if not kept:
        raise EmptyCandidateSet(
            f"every candidate module already exceeds the maximum I/O size of {params.max_io} pins"
        )
    return kept
