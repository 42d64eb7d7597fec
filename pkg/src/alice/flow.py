"""End-to-end redaction flow: parse, filter, cluster, characterize, select, rewrite."""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from alice.clustering import enumerate_clusters
from alice.config import RunConfig
from alice.dataflow import DataflowGraph, build_dataflow_graph
from alice.errors import AliceError, EmptyCandidateSet, FlowError, NoSolution
from alice.fabric import ReportEntry, characterize, load_external_report
from alice.filtering import rank_and_select, score_instances, structural_filter
from alice.hdl.hierarchy import build_instance_tree
from alice.hdl.parser import parse_files
from alice.report import NO_CANDIDATES, NO_SOLUTION, PhaseStats, RunReport, emit_report
from alice.rewriter import RedactedDesign, redact_design
from alice.selection import Solution, compute_scores, enumerate_solutions, rank_solutions

log = logging.getLogger(__name__)


@dataclass
class FlowResult:
    report: RunReport
    solution: Solution | None = None
    redacted: RedactedDesign | None = None
    graph: DataflowGraph | None = None


@contextmanager
def _phase(name: str):
    try:
        yield
    except (EmptyCandidateSet, NoSolution):
        raise
    except AliceError as exc:
        raise FlowError(name, exc) from exc


class _Clock:
    def __init__(self):
        self.start = time.perf_counter()

    def ms(self) -> float:
        return (time.perf_counter() - self.start) * 1000.0


def run_flow(
    cfg: RunConfig,
    characterizer_report: str | Path | None = None,
) -> FlowResult:
    """Run every phase and return the report plus the redacted design (on success).

    No-candidate and no-solution outcomes are reported through ``status``;
    every other failure raises ``FlowError`` naming the phase.
    """
    params = cfg.params
    with _phase("parse"):
        design = parse_files(cfg.sources, top=cfg.top)
        tree = build_instance_tree(design)
    overrides: dict[str, ReportEntry] = {}
    if characterizer_report is not None:
        with _phase("fabric_model"):
            overrides = load_external_report(characterizer_report)

    report = RunReport(design=design.top, config=cfg.name, instances=len(tree))
    result = FlowResult(report)

    clock = _Clock()
    with _phase("dataflow"):
        graph = build_dataflow_graph(design, tree)
    result.graph = graph
    candidates: set[str] = set()
    try:
        with _phase("filtering"):
            relevant = rank_and_select(
                score_instances(graph, params.selected_outputs, params.impact), params.select_policy
            )
            if not relevant:
                raise EmptyCandidateSet("no instance affects the selected outputs")
            candidates = structural_filter(relevant, design, tree, params)
    except EmptyCandidateSet as exc:
        report.status = NO_CANDIDATES
        report.message = str(exc)
        report.filtering = PhaseStats(clock.ms(), {"R": 0})
        return result
    report.filtering = PhaseStats(clock.ms(), {"R": len(candidates)})

    clock = _Clock()
    with _phase("clustering"):
        clusters = enumerate_clusters(candidates, design, tree, params)
    report.clustering = PhaseStats(clock.ms(), {"C": len(clusters)})

    clock = _Clock()
    with _phase("fabric_model"):
        fabrics, rejected = characterize(clusters, design, tree, params, overrides)
    for key, reason in rejected.items():
        log.info("cluster %s rejected: %s", key, reason)
    with _phase("selection"):
        scores = compute_scores(fabrics, params.alpha, params.beta)
        solutions = enumerate_solutions(fabrics, params.max_efpgas, scores)
        try:
            best = rank_solutions(solutions, params.rank_order)
        except NoSolution as exc:
            best = None
            report.status = NO_SOLUTION
            report.message = str(exc)
    counters = {"valid_efpgas": len(fabrics), "S": len(solutions)}
    if best is not None:
        counters["efpga_sizes"] = best.sizes
        counters["redacted_modules"] = best.redacted
    report.selection = PhaseStats(clock.ms(), counters)
    if best is None:
        return result

    result.solution = best
    report.solution = [
        {
            "members": sorted(f.cluster.members),
            "size": f.size,
            "io_used": f.io_used,
            "io_capacity": f.io_capacity,
            "clb_used": f.clb_used,
            "clb_capacity": f.clb_capacity,
            "score": float(scores[f.key]),
            "source": f.source,
        }
        for f in sorted(best.fabrics, key=lambda f: f.key)
    ]
    with _phase("rewriter"):
        result.redacted = redact_design(design, best, tree)
    return result


def write_artifacts(result: FlowResult, out_dir: str | Path, dump_dataflow: bool = False) -> list[Path]:
    """Write report, redacted design, stubs and manifest; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: dict[str, str] = {
        "report.json": emit_report(result.report, "json"),
        "report.txt": emit_report(result.report, "table"),
    }
    if result.redacted is not None:
        files["redacted_top.v"] = result.redacted.top_verilog()
        files.update(result.redacted.stub_verilog())
        files["manifest.json"] = result.redacted.manifest_json()
    if dump_dataflow and result.graph is not None:
        files["dataflow.dot"] = result.graph.to_dot()
    written = []
    for name, text in files.items():
        path = out / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    return written
