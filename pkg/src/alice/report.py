"""Run report: per-phase timings and counters, rendered as JSON or a table row."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

SUCCESS = "success"
NO_CANDIDATES = "no_candidates"
NO_SOLUTION = "no_solution"
ERROR = "error"

EXIT_CODES = {SUCCESS: 0, ERROR: 1, NO_CANDIDATES: 2, NO_SOLUTION: 3}

TABLE_COLUMNS = (
    "Design",
    "Config",
    "Time",
    "|R|",
    "Time",
    "|C|",
    "Time",
    "# valid eFPGAs",
    "|S|",
    "eFPGA size",
    "# redacted modules",
)


@dataclass
class PhaseStats:
    elapsed_ms: float = 0.0
    counters: dict = field(default_factory=dict)


@dataclass
class RunReport:
    design: str
    config: str
    instances: int = 0
    status: str = SUCCESS
    filtering: PhaseStats | None = None
    clustering: PhaseStats | None = None
    selection: PhaseStats | None = None
    solution: list[dict] = field(default_factory=list)
    message: str = ""

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_dict(self) -> dict:
        out: dict = {
            "design": self.design,
            "config": self.config,
            "instances": self.instances,
            "status": self.status,
        }
        for name in ("filtering", "clustering", "selection"):
            phase = getattr(self, name)
            if phase is not None:
                out[name] = {"elapsed_ms": round(phase.elapsed_ms, 3), **phase.counters}
        if self.solution:
            out["solution"] = self.solution
        if self.message:
            out["message"] = self.message
        return out


def _ms(phase: PhaseStats | None) -> str:
    return "-" if phase is None else f"{phase.elapsed_ms / 1000:.3f}s"


def _get(phase: PhaseStats | None, key: str) -> str:
    if phase is None or key not in phase.counters:
        return "-"
    value = phase.counters[key]
    if isinstance(value, list):
        return ", ".join(value) if value else "-"
    return str(value)


def table_row(report: RunReport) -> list[str]:
    return [
        report.design,
        report.config,
        _ms(report.filtering),
        _get(report.filtering, "R"),
        _ms(report.clustering),
        _get(report.clustering, "C"),
        _ms(report.selection),
        _get(report.selection, "valid_efpgas"),
        _get(report.selection, "S"),
        _get(report.selection, "efpga_sizes"),
        _get(report.selection, "redacted_modules"),
    ]


def format_table(reports: list[RunReport]) -> str:
    rows = [list(TABLE_COLUMNS)] + [table_row(r) for r in reports]
    widths = [max(len(row[i]) for row in rows) for i in range(len(TABLE_COLUMNS))]
    lines = []
    for n, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def emit_report(report: RunReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    if fmt == "table":
        return format_table([report])
    raise ValueError(f"unknown report format {fmt!r}")
