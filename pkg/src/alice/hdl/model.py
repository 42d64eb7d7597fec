"""Typed representation of the supported Verilog subset.

All nodes are frozen dataclasses built from tuples, so a parsed ``Design`` is
an immutable value. Source locations are carried for diagnostics but are
excluded from equality: two designs are structurally equal when they have the
same modules, ports, nets, logic and connections.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from alice.errors import SourceLoc

INPUT = "input"
OUTPUT = "output"
INOUT = "inout"
DIRECTIONS = (INPUT, OUTPUT, INOUT)


@dataclass(frozen=True)
class Range:
    msb: int
    lsb: int

    @property
    def width(self) -> int:
        return abs(self.msb - self.lsb) + 1


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class Ident:
    name: str


@dataclass(frozen=True)
class Number:
    """Integer literal. ``text`` is the literal as written, ``width`` is None when unsized."""

    text: str
    width: int | None = None


@dataclass(frozen=True)
class Index:
    name: str
    index: "Expr"


@dataclass(frozen=True)
class Slice:
    name: str
    msb: int
    lsb: int


@dataclass(frozen=True)
class Concat:
    items: tuple["Expr", ...]


@dataclass(frozen=True)
class Repeat:
    count: int
    items: tuple["Expr", ...]


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Ternary:
    cond: "Expr"
    then: "Expr"
    other: "Expr"


Expr = Union[Ident, Number, Index, Slice, Concat, Repeat, Unary, Binary, Ternary]


def expr_children(expr: Expr) -> tuple[Expr, ...]:
    if isinstance(expr, Index):
        return (expr.index,)
    if isinstance(expr, (Concat, Repeat)):
        return expr.items
    if isinstance(expr, Unary):
        return (expr.operand,)
    if isinstance(expr, Binary):
        return (expr.left, expr.right)
    if isinstance(expr, Ternary):
        return (expr.cond, expr.then, expr.other)
    return ()


def signals_read(expr: Expr | None) -> set[str]:
    """Names of every signal referenced by ``expr``."""
    out: set[str] = set()
    stack = [expr] if expr is not None else []
    while stack:
        e = stack.pop()
        if isinstance(e, Ident):
            out.add(e.name)
        elif isinstance(e, (Index, Slice)):
            out.add(e.name)
        stack.extend(expr_children(e))
    return out


def lvalue_targets(expr: Expr) -> set[str]:
    """Signals written when ``expr`` is used as an assignment target."""
    if isinstance(expr, (Ident, Index, Slice)):
        return {expr.name}
    if isinstance(expr, Concat):
        out: set[str] = set()
        for item in expr.items:
            out |= lvalue_targets(item)
        return out
    return set()


def lvalue_index_reads(expr: Expr) -> set[str]:
    """Signals read while selecting the written bits of an lvalue (``q[i] <= ...``)."""
    if isinstance(expr, Index):
        return signals_read(expr.index)
    if isinstance(expr, Concat):
        out: set[str] = set()
        for item in expr.items:
            out |= lvalue_index_reads(item)
        return out
    return set()


# -- statements --------------------------------------------------------------


@dataclass(frozen=True)
class AssignStmt:
    lhs: Expr
    rhs: Expr
    blocking: bool


@dataclass(frozen=True)
class Block:
    stmts: tuple["Stmt", ...]


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    other: "Stmt | None" = None


@dataclass(frozen=True)
class CaseItem:
    labels: tuple[Expr, ...]  # empty tuple means ``default``
    body: "Stmt"


@dataclass(frozen=True)
class Case:
    kind: str  # case, casez, casex
    subject: Expr
    items: tuple[CaseItem, ...]


Stmt = Union[AssignStmt, Block, If, Case]


def walk_stmts(stmt: Stmt) -> Iterator[Stmt]:
    yield stmt
    if isinstance(stmt, Block):
        for s in stmt.stmts:
            yield from walk_stmts(s)
    elif isinstance(stmt, If):
        yield from walk_stmts(stmt.then)
        if stmt.other is not None:
            yield from walk_stmts(stmt.other)
    elif isinstance(stmt, Case):
        for item in stmt.items:
            yield from walk_stmts(item.body)


def stmt_writes(stmt: Stmt) -> set[str]:
    out: set[str] = set()
    for s in walk_stmts(stmt):
        if isinstance(s, AssignStmt):
            out |= lvalue_targets(s.lhs)
    return out


def stmt_reads(stmt: Stmt) -> set[str]:
    out: set[str] = set()
    for s in walk_stmts(stmt):
        if isinstance(s, AssignStmt):
            out |= signals_read(s.rhs) | lvalue_index_reads(s.lhs)
        elif isinstance(s, If):
            out |= signals_read(s.cond)
        elif isinstance(s, Case):
            out |= signals_read(s.subject)
            for item in s.items:
                for label in item.labels:
                    out |= signals_read(label)
    return out


# -- module structure --------------------------------------------------------


@dataclass(frozen=True)
class Port:
    name: str
    direction: str
    range: Range | None = None
    is_reg: bool = False
    signed: bool = False
    loc: SourceLoc | None = field(default=None, compare=False, repr=False)

    @property
    def width(self) -> int:
        return self.range.width if self.range else 1


@dataclass(frozen=True)
class Net:
    name: str
    kind: str  # wire or reg
    range: Range | None = None
    signed: bool = False
    loc: SourceLoc | None = field(default=None, compare=False, repr=False)

    @property
    def width(self) -> int:
        return self.range.width if self.range else 1


@dataclass(frozen=True)
class Assign:
    lhs: Expr
    rhs: Expr
    loc: SourceLoc | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class SensItem:
    signal: str
    edge: str | None = None  # posedge, negedge or None for level


@dataclass(frozen=True)
class Process:
    """An ``always`` block. ``sensitivity`` is None for ``@*``."""

    sensitivity: tuple[SensItem, ...] | None
    body: Stmt
    loc: SourceLoc | None = field(default=None, compare=False, repr=False)

    @property
    def clocked(self) -> bool:
        return bool(self.sensitivity) and any(s.edge for s in self.sensitivity)

    @property
    def edge_signals(self) -> set[str]:
        return {s.signal for s in self.sensitivity or () if s.edge}


@dataclass(frozen=True)
class Connection:
    port: str
    expr: Expr | None


@dataclass(frozen=True)
class Instance:
    name: str
    module: str
    connections: tuple[Connection, ...]
    loc: SourceLoc | None = field(default=None, compare=False, repr=False)

    def connection(self, port: str) -> Expr | None:
        for conn in self.connections:
            if conn.port == port:
                return conn.expr
        return None


@dataclass(frozen=True)
class ModuleDef:
    name: str
    ports: tuple[Port, ...] = ()
    nets: tuple[Net, ...] = ()
    assigns: tuple[Assign, ...] = ()
    processes: tuple[Process, ...] = ()
    instances: tuple[Instance, ...] = ()
    loc: SourceLoc | None = field(default=None, compare=False, repr=False)

    def port(self, name: str) -> Port | None:
        for p in self.ports:
            if p.name == name:
                return p
        return None

    def net(self, name: str) -> Net | None:
        for n in self.nets:
            if n.name == name:
                return n
        return None

    def instance(self, name: str) -> Instance | None:
        for inst in self.instances:
            if inst.name == name:
                return inst
        return None

    def signal_width(self, name: str) -> int | None:
        decl = self.port(name) or self.net(name)
        return decl.width if decl else None

    @property
    def timing_signals(self) -> set[str]:
        """Signals used as edges in sensitivity lists (clocks and asynchronous resets)."""
        out: set[str] = set()
        for proc in self.processes:
            out |= proc.edge_signals
        return out


@dataclass(frozen=True)
class Design:
    modules: dict[str, ModuleDef]
    top: str

    def __getitem__(self, name: str) -> ModuleDef:
        return self.modules[name]


def expr_width(expr: Expr, module: ModuleDef) -> int | None:
    """Self-determined width of ``expr``; None when it cannot be fixed (unsized literal)."""
    if isinstance(expr, Ident):
        return module.signal_width(expr.name)
    if isinstance(expr, Number):
        return expr.width
    if isinstance(expr, Index):
        return 1
    if isinstance(expr, Slice):
        return abs(expr.msb - expr.lsb) + 1
    if isinstance(expr, (Concat, Repeat)):
        total = 0
        for item in expr.items:
            w = expr_width(item, module)
            total += 32 if w is None else w
        return total * (expr.count if isinstance(expr, Repeat) else 1)
    if isinstance(expr, Unary):
        if expr.op in ("~", "-", "+"):
            return expr_width(expr.operand, module)
        return 1
    if isinstance(expr, Binary):
        if expr.op in COMPARE_OPS or expr.op in LOGICAL_OPS:
            return 1
        lw = expr_width(expr.left, module)
        if expr.op in SHIFT_OPS or expr.op == "**":
            return lw
        rw = expr_width(expr.right, module)
        if lw is None or rw is None:
            return lw if rw is None else rw
        return max(lw, rw)
    if isinstance(expr, Ternary):
        tw = expr_width(expr.then, module)
        ow = expr_width(expr.other, module)
        if tw is None or ow is None:
            return tw if ow is None else ow
        return max(tw, ow)
    raise TypeError(f"not an expression: {expr!r}")


COMPARE_OPS = frozenset({"==", "!=", "===", "!==", "<", "<=", ">", ">="})
LOGICAL_OPS = frozenset({"&&", "||"})
SHIFT_OPS = frozenset({"<<", ">>", "<<<", ">>>"})
BITWISE_OPS = frozenset({"&", "|", "^", "~^", "^~"})
ARITH_OPS = frozenset({"+", "-", "*", "/", "%", "**"})
REDUCTION_OPS = frozenset({"&", "~&", "|", "~|", "^", "~^", "^~"})
