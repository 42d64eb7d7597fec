"""Analytic eFPGA characterization.

Stands in for running a fabric generator on every candidate cluster. The
fabric is a ``w x w`` array of CLBs, each holding four logic elements (one
4-input LUT plus one flip-flop), with ``io_per_side_unit * w`` GPIOs.

Resource cost table, per module and summed over its sub-instances:

=============================  =============================
construct                      cost
=============================  =============================
n-bit bitwise ``& | ^ ~^``     n LUTs
n-bit ``+ -`` / comparison     n LUTs
n-bit 2:1 mux (``?:``, if)     n LUTs
n x m multiply                 n*m LUTs
n-bit ``~`` / unary ``-``      n LUTs
n-bit reduction / ``!``        ceil((n-1)/3) LUTs, min 1
``&&`` ``||``                  1 LUT
shift by a constant            wiring
case with k branches           (k-1) muxes per written signal
register bit                   1 FF
=============================  =============================

Reset branches of clocked processes (conditions that only read clock or
asynchronous reset nets) map onto the flip-flop and cost nothing. Division,
modulo, power and variable shifts have no entry and are rejected.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from alice.clustering import Cluster
from alice.errors import Infeasible, ReportParseError, ReportSchemaError, UnsupportedExpression
from alice.hdl.hierarchy import InstanceTree, build_instance_tree
from alice.hdl.model import (
    BITWISE_OPS,
    COMPARE_OPS,
    LOGICAL_OPS,
    SHIFT_OPS,
    AssignStmt,
    Binary,
    Block,
    Case,
    Design,
    Expr,
    If,
    Index,
    ModuleDef,
    Number,
    Stmt,
    Ternary,
    Unary,
    expr_children,
    expr_width,
    signals_read,
    stmt_writes,
)
from alice.params import FlowParams

log = logging.getLogger(__name__)

LES_PER_CLB = 4


@dataclass(frozen=True)
class ResourceEstimate:
    io_pins: int
    luts: int
    ffs: int

    def __add__(self, other: "ResourceEstimate") -> "ResourceEstimate":
        return ResourceEstimate(self.io_pins + other.io_pins, self.luts + other.luts, self.ffs + other.ffs)


@dataclass(frozen=True)
class FabricImpl:
    cluster: Cluster
    w: int
    io_used: int
    io_capacity: int
    clb_used: int
    clb_capacity: int
    luts: int = 0
    ffs: int = 0
    source: str = "model"

    @property
    def key(self) -> str:
        return self.cluster.key

    @property
    def size(self) -> str:
        return f"{self.w}x{self.w}"

    @property
    def io_util(self) -> float:
        return self.io_used / self.io_capacity

    @property
    def clb_util(self) -> float:
        return self.clb_used / self.clb_capacity

    @property
    def io_util_exact(self) -> Fraction:
        return Fraction(self.io_used, self.io_capacity)

    @property
    def clb_util_exact(self) -> Fraction:
        return Fraction(self.clb_used, self.clb_capacity)


@dataclass(frozen=True)
class ReportEntry:
    w: int
    io_used: int
    clb_used: int
    valid: bool


# -- cost model ----------------------------------------------------------------


def _reduction_luts(width: int) -> int:
    return max(1, math.ceil((width - 1) / 3))


def _width(expr: Expr, module: ModuleDef) -> int:
    w = expr_width(expr, module)
    return 32 if w is None else w


def expr_luts(expr: Expr, module: ModuleDef) -> int:
    cost = sum(expr_luts(child, module) for child in expr_children(expr))
    if isinstance(expr, Index) and not isinstance(expr.index, Number):
        # Variable bit-select: an n:1 mux built from 2:1 stages.
        cost += max(0, (module.signal_width(expr.name) or 1) - 1)
    elif isinstance(expr, Unary):
        n = _width(expr.operand, module)
        if expr.op in ("~", "-"):
            cost += n
        elif expr.op != "+":
            cost += _reduction_luts(n)
    elif isinstance(expr, Binary):
        lw, rw = _width(expr.left, module), _width(expr.right, module)
        op = expr.op
        if op in BITWISE_OPS or op in ("+", "-") or op in COMPARE_OPS:
            cost += max(lw, rw)
        elif op == "*":
            cost += lw * rw
        elif op in LOGICAL_OPS:
            cost += 1
        elif op in SHIFT_OPS and isinstance(expr.right, Number):
            pass
        else:
            raise UnsupportedExpression(op if op not in SHIFT_OPS else f"{op} (variable amount)", module.name)
    elif isinstance(expr, Ternary):
        cost += _width(expr, module)
    return cost


def _written_width(stmt: Stmt, module: ModuleDef) -> int:
    return sum(module.signal_width(s) or 1 for s in stmt_writes(stmt))


def stmt_luts(stmt: Stmt, module: ModuleDef, clocked: bool, timing: set[str]) -> int:
    if isinstance(stmt, AssignStmt):
        return expr_luts(stmt.rhs, module) + (expr_luts(stmt.lhs, module) if isinstance(stmt.lhs, Index) else 0)
    if isinstance(stmt, Block):
        return sum(stmt_luts(s, module, clocked, timing) for s in stmt.stmts)
    if isinstance(stmt, If):
        cost = stmt_luts(stmt.then, module, clocked, timing)
        if stmt.other is not None:
            cost += stmt_luts(stmt.other, module, clocked, timing)
        cond_reads = signals_read(stmt.cond)
        if clocked and cond_reads and cond_reads <= timing:
            return cost
        written = stmt_writes(stmt.then) | (stmt_writes(stmt.other) if stmt.other is not None else set())
        cost += expr_luts(stmt.cond, module)
        cost += sum(module.signal_width(s) or 1 for s in written)
        return cost
    if isinstance(stmt, Case):
        cost = expr_luts(stmt.subject, module)
        written: set[str] = set()
        for item in stmt.items:
            cost += stmt_luts(item.body, module, clocked, timing)
            written |= stmt_writes(item.body)
        branches = len(stmt.items)
        cost += max(0, branches - 1) * sum(module.signal_width(s) or 1 for s in written)
        return cost
    raise TypeError(f"not a statement: {stmt!r}")


def module_logic(module: ModuleDef) -> tuple[int, int]:
    """(LUTs, FFs) of the module's own logic, excluding sub-instances."""
    luts = sum(expr_luts(a.rhs, module) for a in module.assigns)
    registers: set[str] = set()
    for proc in module.processes:
        luts += stmt_luts(proc.body, module, proc.clocked, proc.edge_signals)
        if proc.clocked:
            registers |= stmt_writes(proc.body)
    ffs = sum(module.signal_width(r) or 1 for r in registers)
    return luts, ffs


def module_resources(design: Design, name: str, _memo: dict | None = None) -> tuple[int, int]:
    """(LUTs, FFs) of a module including everything it instantiates."""
    memo = {} if _memo is None else _memo
    if name not in memo:
        module = design.modules[name]
        luts, ffs = module_logic(module)
        for inst in module.instances:
            child_luts, child_ffs = module_resources(design, inst.module, memo)
            luts += child_luts
            ffs += child_ffs
        memo[name] = (luts, ffs)
    return memo[name]


def estimate_resources(cluster: Cluster, design: Design, tree: InstanceTree | None = None) -> ResourceEstimate:
    tree = tree if tree is not None else build_instance_tree(design)
    memo: dict = {}
    luts = ffs = 0
    for member in sorted(cluster.members):
        l, f = module_resources(design, tree.module_of(member), memo)
        luts += l
        ffs += f
    return ResourceEstimate(cluster.agg_pins, luts, ffs)


# -- sizing --------------------------------------------------------------------


def io_capacity(w: int, io_per_side_unit: int = 16) -> int:
    return io_per_side_unit * w


def clb_capacity(w: int) -> int:
    return w * w


def size_fabric(est: ResourceEstimate, params: FlowParams, cluster: Cluster | None = None) -> FabricImpl:
    """Smallest ``w`` in the permitted range that holds ``est``; raises ``Infeasible``."""
    logic = max(est.luts, est.ffs)
    for w in range(params.fabric_w_min, params.fabric_w_max + 1):
        if io_capacity(w, params.io_per_side_unit) >= est.io_pins and LES_PER_CLB * w * w >= logic:
            return FabricImpl(
                cluster=cluster if cluster is not None else Cluster(frozenset(), est.io_pins),
                w=w,
                io_used=est.io_pins,
                io_capacity=io_capacity(w, params.io_per_side_unit),
                # Even pure wiring occupies one CLB; keeps utilization positive.
                clb_used=max(1, math.ceil(logic / LES_PER_CLB)),
                clb_capacity=clb_capacity(w),
                luts=est.luts,
                ffs=est.ffs,
            )
    w_max = params.fabric_w_max
    if io_capacity(w_max, params.io_per_side_unit) < est.io_pins:
        raise Infeasible("io", f"{est.io_pins} pins > {io_capacity(w_max, params.io_per_side_unit)} at {w_max}x{w_max}")
    raise Infeasible("logic", f"{logic} LEs > {LES_PER_CLB * w_max * w_max} at {w_max}x{w_max}")


def is_valid(fabric: FabricImpl, params: FlowParams) -> bool:
    return (
        params.fabric_w_min <= fabric.w <= params.fabric_w_max
        and 0 < fabric.io_used <= fabric.io_capacity
        and 0 < fabric.clb_used <= fabric.clb_capacity
    )


# -- external characterizer reports ----------------------------------------------


def load_external_report(path: str | Path) -> dict[str, ReportEntry]:
    """Read a characterizer report: ``{cluster_key: {w, io_used, clb_used, valid}}``."""
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ReportParseError(f"{path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ReportSchemaError(f"{path}: top level must be an object mapping cluster keys to entries")
    entries = {}
    for key, value in data.items():
        if not isinstance(value, dict):
            raise ReportSchemaError(f"{path}: entry {key!r} must be an object")
        missing = {"w", "io_used", "clb_used", "valid"} - value.keys()
        if missing:
            raise ReportSchemaError(f"{path}: entry {key!r} lacks {', '.join(sorted(missing))}")
        for name in ("w", "io_used", "clb_used"):
            if not isinstance(value[name], int) or isinstance(value[name], bool):
                raise ReportSchemaError(f"{path}: entry {key!r} field {name!r} must be an integer")
        if not isinstance(value["valid"], bool):
            raise ReportSchemaError(f"{path}: entry {key!r} field 'valid' must be a boolean")
        entries[key] = ReportEntry(value["w"], value["io_used"], value["clb_used"], value["valid"])
    return entries


def characterize(
    clusters: list[Cluster],
    design: Design,
    tree: InstanceTree,
    params: FlowParams,
    overrides: Mapping[str, ReportEntry] | None = None,
) -> tuple[list[FabricImpl], dict[str, str]]:
    """Size a fabric for every cluster.

    Returns the valid implementations (in cluster order) and, for every
    rejected cluster, the reason. Report entries take precedence over the
    analytic model but must still pass the validity check.
    """
    overrides = dict(overrides or {})
    keys = {c.key for c in clusters}
    for key in sorted(overrides.keys() - keys):
        log.warning("characterizer report entry %r matches no candidate cluster", key)

    valid: list[FabricImpl] = []
    rejected: dict[str, str] = {}
    for cluster in clusters:
        entry = overrides.get(cluster.key)
        if entry is not None:
            if not entry.valid:
                rejected[cluster.key] = "marked invalid by characterizer report"
                continue
            fabric = FabricImpl(
                cluster=cluster,
                w=entry.w,
                io_used=entry.io_used,
                io_capacity=io_capacity(entry.w, params.io_per_side_unit),
                clb_used=entry.clb_used,
                clb_capacity=clb_capacity(max(entry.w, 0)),
                source="report",
            )
            if entry.w >= 1 and is_valid(fabric, params) and entry.io_used >= cluster.agg_pins:
                valid.append(fabric)
                continue
            log.warning("characterizer report entry %r rejected (w=%d fails the validity check)", cluster.key, entry.w)
        try:
            est = estimate_resources(cluster, design, tree)
            fabric = size_fabric(est, params, cluster)
        except Infeasible as exc:
            rejected[cluster.key] = str(exc)
            continue
        valid.append(fabric)
    return valid, rejected
