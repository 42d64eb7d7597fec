"""Verilog text generation from the design representation."""

from __future__ import annotations

from alice.hdl.model import (
    AssignStmt,
    Binary,
    Block,
    Case,
    Concat,
    Design,
    Expr,
    Ident,
    If,
    Index,
    ModuleDef,
    Number,
    Range,
    Repeat,
    Slice,
    Stmt,
    Ternary,
    Unary,
)
from alice.hdl.parser import BINARY_PRECEDENCE

INDENT = "  "
_UNARY_PREC = 12


def _range(rng: Range | None) -> str:
    return f"[{rng.msb}:{rng.lsb}] " if rng else ""


def _prec(expr: Expr) -> int:
    if isinstance(expr, Ternary):
        return 0
    if isinstance(expr, Binary):
        return BINARY_PRECEDENCE[expr.op]
    if isinstance(expr, Unary):
        return _UNARY_PREC
    return 99


def emit_expr(expr: Expr) -> str:
    if isinstance(expr, Ident):
        return expr.name
    if isinstance(expr, Number):
        return expr.text
    if isinstance(expr, Index):
        return f"{expr.name}[{emit_expr(expr.index)}]"
    if isinstance(expr, Slice):
        return f"{expr.name}[{expr.msb}:{expr.lsb}]"
    if isinstance(expr, Concat):
        return "{" + ", ".join(emit_expr(e) for e in expr.items) + "}"
    if isinstance(expr, Repeat):
        return "{" + str(expr.count) + "{" + ", ".join(emit_expr(e) for e in expr.items) + "}}"
    if isinstance(expr, Unary):
        inner = emit_expr(expr.operand)
        if _prec(expr.operand) < 99:
            inner = f"({inner})"
        # Keep "- -a" and "& &a" from fusing into another token.
        sep = " " if inner[:1] in "+-!~&|^" else ""
        return f"{expr.op}{sep}{inner}"
    if isinstance(expr, Binary):
        prec = BINARY_PRECEDENCE[expr.op]
        left = emit_expr(expr.left)
        right = emit_expr(expr.right)
        # Binary operators are left-associative: the right operand needs
        # parentheses at equal precedence, the left one only below it.
        if _prec(expr.left) < prec:
            left = f"({left})"
        if _prec(expr.right) <= prec:
            right = f"({right})"
        return f"{left} {expr.op} {right}"
    if isinstance(expr, Ternary):
        cond = emit_expr(expr.cond)
        if _prec(expr.cond) == 0:
            cond = f"({cond})"
        return f"{cond} ? {emit_expr(expr.then)} : {emit_expr(expr.other)}"
    raise TypeError(f"not an expression: {expr!r}")


def _dangles(stmt: Stmt) -> bool:
    """True when an ``else`` emitted after ``stmt`` would bind to an inner ``if``."""
    if isinstance(stmt, If):
        return stmt.other is None or _dangles(stmt.other)
    return False


def _emit_stmt(stmt: Stmt, depth: int, out: list[str]) -> None:
    pad = INDENT * depth
    if isinstance(stmt, AssignStmt):
        op = "=" if stmt.blocking else "<="
        out.append(f"{pad}{emit_expr(stmt.lhs)} {op} {emit_expr(stmt.rhs)};")
    elif isinstance(stmt, Block) and not stmt.stmts:
        out.append(f"{pad};")
    elif isinstance(stmt, Block):
        out.append(f"{pad}begin")
        for s in stmt.stmts:
            _emit_stmt(s, depth + 1, out)
        out.append(f"{pad}end")
    elif isinstance(stmt, If):
        out.append(f"{pad}if ({emit_expr(stmt.cond)})")
        then = stmt.then
        if stmt.other is not None and _dangles(then):
            then = Block((then,))
        _emit_stmt(then, depth + 1, out)
        if stmt.other is not None:
            out.append(f"{pad}else")
            _emit_stmt(stmt.other, depth + 1, out)
    elif isinstance(stmt, Case):
        out.append(f"{pad}{stmt.kind} ({emit_expr(stmt.subject)})")
        for item in stmt.items:
            label = ", ".join(emit_expr(e) for e in item.labels) if item.labels else "default"
            out.append(f"{pad}{INDENT}{label}:")
            _emit_stmt(item.body, depth + 2, out)
        out.append(f"{pad}endcase")
    else:
        raise TypeError(f"not a statement: {stmt!r}")


def emit_module(module: ModuleDef) -> str:
    lines: list[str] = []
    if module.ports:
        lines.append(f"module {module.name} (")
        for i, port in enumerate(module.ports):
            kind = "reg " if port.is_reg else ""
            signed = "signed " if port.signed else ""
            comma = "," if i < len(module.ports) - 1 else ""
            lines.append(f"{INDENT}{port.direction} {kind}{signed}{_range(port.range)}{port.name}{comma}")
        lines.append(");")
    else:
        lines.append(f"module {module.name};")
    for net in module.nets:
        signed = "signed " if net.signed else ""
        lines.append(f"{INDENT}{net.kind} {signed}{_range(net.range)}{net.name};")
    for assign in module.assigns:
        lines.append(f"{INDENT}assign {emit_expr(assign.lhs)} = {emit_expr(assign.rhs)};")
    for proc in module.processes:
        if proc.sensitivity is None:
            sens = "*"
        else:
            sens = " or ".join(f"{s.edge} {s.signal}" if s.edge else s.signal for s in proc.sensitivity)
        lines.append(f"{INDENT}always @({sens})")
        _emit_stmt(proc.body, 2, lines)
    for inst in module.instances:
        if not inst.connections:
            lines.append(f"{INDENT}{inst.module} {inst.name} ();")
            continue
        lines.append(f"{INDENT}{inst.module} {inst.name} (")
        for i, conn in enumerate(inst.connections):
            value = emit_expr(conn.expr) if conn.expr is not None else ""
            comma = "," if i < len(inst.connections) - 1 else ""
            lines.append(f"{INDENT * 2}.{conn.port}({value}){comma}")
        lines.append(f"{INDENT});")
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


def emit_verilog(design: Design, modules: list[str] | None = None) -> str:
    """Render ``design`` (or the named subset of its modules) as Verilog text."""
    names = list(design.modules) if modules is None else modules
    return "\n".join(emit_module(design.modules[name]) for name in names)
