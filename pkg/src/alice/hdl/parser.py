"""Recursive-descent parser for the supported Verilog subset.

Accepted: ``module``/``endmodule`` with ANSI or non-ANSI port lists, ``wire``
and ``reg`` declarations with constant ranges, continuous ``assign``,
``always`` blocks (``begin``/``end``, ``if``/``else``, ``case``/``casez``/
``casex``, blocking and nonblocking assignments) and module instantiation
with named or positional connections. Everything else raises
``UnsupportedConstruct``; parameters and generate blocks must be elaborated
away before the design reaches this parser.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from alice.errors import (
    DuplicateDeclaration,
    HdlError,
    RecursionDetected,
    ReservedIdentifier,
    SourceLoc,
    UndeclaredSignal,
    UnknownPort,
    UnresolvedModule,
    UnsupportedConstruct,
    VerilogSyntaxError,
    WidthMismatch,
)
from alice.hdl.lexer import Token, tokenize
from alice.hdl.model import (
    DIRECTIONS,
    Assign,
    AssignStmt,
    Binary,
    Block,
    Case,
    CaseItem,
    Concat,
    Connection,
    Design,
    Expr,
    Ident,
    If,
    Index,
    Instance,
    ModuleDef,
    Net,
    Number,
    Port,
    Process,
    Range,
    Repeat,
    SensItem,
    Slice,
    Stmt,
    Ternary,
    Unary,
    expr_width,
    lvalue_targets,
    signals_read,
    stmt_reads,
    stmt_writes,
)

RESERVED_PREFIX = "alice_"

BINARY_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "|": 3,
    "^": 4, "~^": 4, "^~": 4,
    "&": 5,
    "==": 6, "!=": 6, "===": 6, "!==": 6,
    "<": 7, "<=": 7, ">": 7, ">=": 7,
    "<<": 8, ">>": 8, "<<<": 8, ">>>": 8,
    "+": 9, "-": 9,
    "*": 10, "/": 10, "%": 10,
    "**": 11,
}
UNARY_OPS = frozenset({"+", "-", "!", "~", "&", "~&", "|", "~|", "^", "~^", "^~"})

_NUMBER_RE = re.compile(r"^(?:(\d[\d_]*))?'([sS]?)([bBoOdDhH])([0-9a-fA-FxXzZ_?]+)$")


def number_width(text: str) -> int | None:
    m = _NUMBER_RE.match(text)
    if m and m.group(1):
        return int(m.group(1).replace("_", ""))
    return None


def number_value(text: str) -> int | None:
    """Integer value of a literal, or None when it contains x/z digits."""
    m = _NUMBER_RE.match(text)
    if not m:
        return int(text.replace("_", ""))
    digits = m.group(4).replace("_", "")
    if re.search(r"[xXzZ?]", digits):
        return None
    return int(digits, {"b": 2, "o": 8, "d": 10, "h": 16}[m.group(3).lower()])


@dataclass
class _PortDecl:
    name: str
    direction: str
    range: Range | None
    is_reg: bool
    signed: bool
    loc: SourceLoc


@dataclass
class _RawModule:
    name: str
    loc: SourceLoc
    ansi: bool = True
    header_names: list[tuple[str, SourceLoc]] = field(default_factory=list)
    port_decls: list[_PortDecl] = field(default_factory=list)
    nets: list[Net] = field(default_factory=list)
    assigns: list[Assign] = field(default_factory=list)
    processes: list[Process] = field(default_factory=list)
    # (instance name, module, named?, [(port or None, expr)], loc)
    instances: list[tuple[str, str, bool, list[tuple[str | None, Expr | None]], SourceLoc]] = field(
        default_factory=list
    )


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # -- token helpers ---------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text == text

    def advance(self) -> Token:
        tok = self.tok
        self.pos += 1
        return tok

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != "id":
            self.fail("identifier")
        return self.advance()

    def fail(self, expected: str):
        found = self.tok.text if self.tok.kind != "eof" else "end of input"
        raise VerilogSyntaxError(expected, found, self.tok.loc)

    # -- top level -------------------------------------------------------

    def parse_source(self) -> list[_RawModule]:
        modules = []
        while self.tok.kind != "eof":
            if not self.at("module"):
                self.fail("'module'")
            modules.append(self.parse_module())
        return modules

    def parse_module(self) -> _RawModule:
        start = self.expect("module")
        name = self.expect_ident().text
        mod = _RawModule(name, start.loc)
        if self.at("#"):
            raise UnsupportedConstruct("parameter port list", self.tok.loc)
        if self.accept("("):
            if self.tok.text in DIRECTIONS and self.tok.kind == "kw":
                self.parse_ansi_ports(mod)
            elif not self.at(")"):
                mod.ansi = False
                while True:
                    if self.at("."):
                        raise UnsupportedConstruct("explicit port expression", self.tok.loc)
                    ident = self.expect_ident()
                    mod.header_names.append((ident.text, ident.loc))
                    if not self.accept(","):
                        break
            self.expect(")")
        else:
            mod.ansi = False
        self.expect(";")
        while not self.at("endmodule"):
            if self.tok.kind == "eof":
                self.fail("'endmodule'")
            self.parse_item(mod)
        self.expect("endmodule")
        return mod

    def parse_decl_header(self) -> tuple[bool, bool, Range | None]:
        is_reg = False
        if self.accept("reg"):
            is_reg = True
        else:
            self.accept("wire")
        signed = self.accept("signed")
        rng = self.parse_range() if self.at("[") else None
        return is_reg, signed, rng

    def parse_ansi_ports(self, mod: _RawModule) -> None:
        direction = self.advance().text
        is_reg, signed, rng = self.parse_decl_header()
        while True:
            ident = self.expect_ident()
            mod.port_decls.append(_PortDecl(ident.text, direction, rng, is_reg, signed, ident.loc))
            if not self.accept(","):
                return
            if self.tok.kind == "kw" and self.tok.text in DIRECTIONS:
                direction = self.advance().text
                is_reg, signed, rng = self.parse_decl_header()

    def parse_range(self) -> Range:
        self.expect("[")
        msb = self.parse_const_int()
        self.expect(":")
        lsb = self.parse_const_int()
        self.expect("]")
        return Range(msb, lsb)

    def parse_const_int(self) -> int:
        tok = self.tok
        if tok.kind == "id":
            raise UnsupportedConstruct(f"non-literal constant expression '{tok.text}'", tok.loc)
        if tok.kind != "num":
            self.fail("integer literal")
        self.advance()
        value = number_value(tok.text)
        if value is None:
            raise VerilogSyntaxError("a known integer", tok.text, tok.loc)
        if self.tok.kind == "op" and self.tok.text in BINARY_PRECEDENCE:
            raise UnsupportedConstruct("constant expression in range", self.tok.loc)
        return value

    def parse_item(self, mod: _RawModule) -> None:
        tok = self.tok
        if tok.kind == "kw" and tok.text in DIRECTIONS:
            if mod.ansi:
                raise DuplicateDeclaration(
                    "port direction declared in the body of a module with an ANSI header", tok.loc
                )
            direction = self.advance().text
            is_reg, signed, rng = self.parse_decl_header()
            while True:
                ident = self.expect_ident()
                mod.port_decls.append(_PortDecl(ident.text, direction, rng, is_reg, signed, ident.loc))
                if not self.accept(","):
                    break
            self.expect(";")
        elif tok.text in ("wire", "reg") and tok.kind == "kw":
            kind = self.advance().text
            signed = self.accept("signed")
            rng = self.parse_range() if self.at("[") else None
            while True:
                ident = self.expect_ident()
                if self.at("["):
                    raise UnsupportedConstruct("memory (array) declaration", self.tok.loc)
                mod.nets.append(Net(ident.text, kind, rng, signed, ident.loc))
                if self.at("="):
                    if kind == "reg":
                        raise UnsupportedConstruct("reg initializer", self.tok.loc)
                    eq = self.advance()
                    mod.assigns.append(Assign(Ident(ident.text), self.parse_expr(), eq.loc))
                if not self.accept(","):
                    break
            self.expect(";")
        elif self.at("assign"):
            self.advance()
            while True:
                loc = self.tok.loc
                lhs = self.parse_lvalue()
                self.expect("=")
                mod.assigns.append(Assign(lhs, self.parse_expr(), loc))
                if not self.accept(","):
                    break
            self.expect(";")
        elif self.at("always"):
            self.advance()
            mod.processes.append(self.parse_always(tok.loc))
        elif tok.kind == "id":
            self.parse_instances(mod)
        else:
            self.fail("module item")

    def parse_always(self, loc: SourceLoc) -> Process:
        if not self.accept("@"):
            raise UnsupportedConstruct("always block without event control", self.tok.loc)
        sens: tuple[SensItem, ...] | None
        if self.accept("*"):
            sens = None
        else:
            self.expect("(")
            if self.accept("*"):
                sens = None
            else:
                items = []
                while True:
                    edge = None
                    if self.at("posedge") or self.at("negedge"):
                        edge = self.advance().text
                    ident = self.expect_ident()
                    if self.at("["):
                        raise UnsupportedConstruct("bit-select in sensitivity list", self.tok.loc)
                    items.append(SensItem(ident.text, edge))
                    if not (self.accept("or") or self.accept(",")):
                        break
                sens = tuple(items)
            self.expect(")")
        return Process(sens, self.parse_stmt(), loc)

    def parse_instances(self, mod: _RawModule) -> None:
        module_name = self.expect_ident().text
        if self.at("#"):
            raise UnsupportedConstruct("parameter override", self.tok.loc)
        while True:
            ident = self.expect_ident()
            if self.at("["):
                raise UnsupportedConstruct("instance array", self.tok.loc)
            self.expect("(")
            conns: list[tuple[str | None, Expr | None]] = []
            named = self.at(".")
            if not self.at(")"):
                while True:
                    if named:
                        self.expect(".")
                        port = self.expect_ident().text
                        self.expect("(")
                        expr = None if self.at(")") else self.parse_expr()
                        self.expect(")")
                        conns.append((port, expr))
                    else:
                        if self.at("."):
                            raise VerilogSyntaxError("positional connection", ".", self.tok.loc)
                        expr = None if self.at(",") or self.at(")") else self.parse_expr()
                        conns.append((None, expr))
                    if not self.accept(","):
                        break
            self.expect(")")
            mod.instances.append((ident.text, module_name, named, conns, ident.loc))
            if not self.accept(","):
                break
        self.expect(";")

    # -- statements ------------------------------------------------------

    def parse_stmt(self) -> Stmt:
        tok = self.tok
        if self.accept("begin"):
            if self.at(":"):
                raise UnsupportedConstruct("named block", self.tok.loc)
            stmts = []
            while not self.at("end"):
                if self.tok.kind == "eof":
                    self.fail("'end'")
                stmts.append(self.parse_stmt())
            self.advance()
            return Block(tuple(stmts))
        if self.accept("if"):
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            then = self.parse_stmt()
            other = self.parse_stmt() if self.accept("else") else None
            return If(cond, then, other)
        if tok.kind == "kw" and tok.text in ("case", "casez", "casex"):
            self.advance()
            self.expect("(")
            subject = self.parse_expr()
            self.expect(")")
            items = []
            while not self.accept("endcase"):
                if self.tok.kind == "eof":
                    self.fail("'endcase'")
                if self.accept("default"):
                    self.accept(":")
                    items.append(CaseItem((), self.parse_stmt()))
                    continue
                labels = [self.parse_expr()]
                while self.accept(","):
                    labels.append(self.parse_expr())
                self.expect(":")
                items.append(CaseItem(tuple(labels), self.parse_stmt()))
            return Case(tok.text, subject, tuple(items))
        if self.accept(";"):
            return Block(())
        if self.at("#"):
            raise UnsupportedConstruct("delay control", tok.loc)
        if self.at("@"):
            raise UnsupportedConstruct("event control inside a statement", tok.loc)
        if self.at("assign"):
            raise UnsupportedConstruct("procedural continuous assignment", tok.loc)
        lhs = self.parse_lvalue()
        if self.accept("="):
            blocking = True
        elif self.accept("<="):
            blocking = False
        else:
            self.fail("'=' or '<='")
        if self.at("#"):
            raise UnsupportedConstruct("intra-assignment delay", self.tok.loc)
        rhs = self.parse_expr()
        self.expect(";")
        return AssignStmt(lhs, rhs, blocking)

    def parse_lvalue(self) -> Expr:
        if self.accept("{"):
            items = [self.parse_lvalue()]
            while self.accept(","):
                items.append(self.parse_lvalue())
            self.expect("}")
            return Concat(tuple(items))
        return self.parse_selectable(self.expect_ident())

    # -- expressions -----------------------------------------------------

    def parse_expr(self) -> Expr:
        cond = self.parse_binary(1)
        if self.accept("?"):
            then = self.parse_expr()
            self.expect(":")
            return Ternary(cond, then, self.parse_expr())
        return cond

    def parse_binary(self, min_prec: int) -> Expr:
        left = self.parse_unary()
        while self.tok.kind == "op" and BINARY_PRECEDENCE.get(self.tok.text, 0) >= min_prec:
            op = self.advance().text
            right = self.parse_binary(BINARY_PRECEDENCE[op] + 1)
            left = Binary(op, left, right)
        return left

    def parse_unary(self) -> Expr:
        if self.tok.kind == "op" and self.tok.text in UNARY_OPS:
            op = self.advance().text
            return Unary(op, self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Number(tok.text, number_width(tok.text))
        if tok.kind == "id":
            self.advance()
            if self.at("("):
                raise UnsupportedConstruct("function call", tok.loc)
            return self.parse_selectable(tok)
        if self.accept("("):
            inner = self.parse_expr()
            self.expect(")")
            return inner
        if self.accept("{"):
            first = self.parse_expr()
            if self.at("{"):
                if not isinstance(first, Number) or number_value(first.text) is None:
                    raise UnsupportedConstruct("non-literal replication count", tok.loc)
                self.advance()
                items = [self.parse_expr()]
                while self.accept(","):
                    items.append(self.parse_expr())
                self.expect("}")
                self.expect("}")
                return Repeat(number_value(first.text), tuple(items))
            items = [first]
            while self.accept(","):
                items.append(self.parse_expr())
            self.expect("}")
            return Concat(tuple(items))
        self.fail("expression")

    def parse_selectable(self, ident: Token) -> Expr:
        if not self.accept("["):
            return Ident(ident.text)
        start = self.tok
        index = self.parse_expr()
        if self.at("+:") or self.at("-:"):
            raise UnsupportedConstruct("indexed part-select", self.tok.loc)
        if self.accept(":"):
            lsb = self.parse_expr()
            self.expect("]")
            bounds = []
            for e in (index, lsb):
                if not isinstance(e, Number) or number_value(e.text) is None:
                    raise UnsupportedConstruct("non-literal part-select bound", start.loc)
                bounds.append(number_value(e.text))
            return Slice(ident.text, bounds[0], bounds[1])
        self.expect("]")
        return Index(ident.text, index)


# -- semantic checks and assembly ---------------------------------------------


def _check_reserved(name: str, loc: SourceLoc | None, allow_reserved: bool) -> None:
    if not allow_reserved and name.startswith(RESERVED_PREFIX):
        raise ReservedIdentifier(
            f"identifier {name!r} uses the reserved prefix {RESERVED_PREFIX!r}", loc
        )


def _build_ports(raw: _RawModule, allow_reserved: bool) -> tuple[list[Port], list[Net]]:
    decls: dict[str, _PortDecl] = {}
    for decl in raw.port_decls:
        _check_reserved(decl.name, decl.loc, allow_reserved)
        if decl.name in decls:
            raise DuplicateDeclaration(f"port {decl.name!r} declared twice", decl.loc)
        decls[decl.name] = decl

    nets: list[Net] = []
    if raw.ansi:
        order = [d.name for d in raw.port_decls]
        extra: dict[str, Net] = {}
    else:
        seen = set()
        for name, loc in raw.header_names:
            if name in seen:
                raise DuplicateDeclaration(f"port {name!r} listed twice", loc)
            seen.add(name)
            if name not in decls:
                raise HdlError(f"port {name!r} has no direction declaration", loc)
        for decl in raw.port_decls:
            if decl.name not in seen:
                raise HdlError(f"{decl.name!r} declared as a port but missing from the port list", decl.loc)
        order = [name for name, _ in raw.header_names]
        extra = {}

    # Non-ANSI style may redeclare a port as wire/reg to give it a kind.
    for net in raw.nets:
        if net.name in decls and not raw.ansi:
            decl = decls[net.name]
            if decl.range is not None and net.range is not None and decl.range.width != net.range.width:
                raise WidthMismatch(f"redeclaration of port {net.name!r}", decl.range.width, net.range.width, net.loc)
            if net.name in extra:
                raise DuplicateDeclaration(f"port {net.name!r} redeclared twice", net.loc)
            extra[net.name] = net
            if decl.range is None:
                decl.range = net.range
            decl.is_reg = decl.is_reg or net.kind == "reg"
            decl.signed = decl.signed or net.signed
        elif net.name in decls:
            raise DuplicateDeclaration(f"{net.name!r} is already declared as a port", net.loc)
        else:
            nets.append(net)

    ports = [
        Port(d.name, d.direction, d.range, d.is_reg, d.signed, d.loc)
        for d in (decls[name] for name in order)
    ]
    return ports, nets


def _build_module(raw: _RawModule, allow_reserved: bool) -> ModuleDef:
    _check_reserved(raw.name, raw.loc, allow_reserved)
    ports, nets = _build_ports(raw, allow_reserved)
    names = {p.name for p in ports}
    for net in nets:
        _check_reserved(net.name, net.loc, allow_reserved)
        if net.name in names:
            raise DuplicateDeclaration(f"signal {net.name!r} declared twice", net.loc)
        names.add(net.name)

    def check_signals(signals: Iterable[str], loc: SourceLoc | None) -> None:
        for name in sorted(signals):
            if name not in names:
                raise UndeclaredSignal(name, raw.name, loc)

    for assign in raw.assigns:
        if not lvalue_targets(assign.lhs):
            raise VerilogSyntaxError("assignable expression", "expression", assign.loc)
        check_signals(signals_read(assign.lhs) | signals_read(assign.rhs), assign.loc)
    for proc in raw.processes:
        check_signals(stmt_reads(proc.body) | stmt_writes(proc.body), proc.loc)
        check_signals((s.signal for s in proc.sensitivity or ()), proc.loc)

    inst_names: set[str] = set()
    for inst_name, _, _, conns, loc in raw.instances:
        _check_reserved(inst_name, loc, allow_reserved)
        if inst_name in inst_names or inst_name in names:
            raise DuplicateDeclaration(f"instance name {inst_name!r} already used", loc)
        inst_names.add(inst_name)
        for _, expr in conns:
            check_signals(signals_read(expr), loc)

    return ModuleDef(
        name=raw.name,
        ports=tuple(ports),
        nets=tuple(nets),
        assigns=tuple(raw.assigns),
        processes=tuple(raw.processes),
        instances=(),
        loc=raw.loc,
    )


def _resolve_instances(raw: _RawModule, module: ModuleDef, modules: dict[str, ModuleDef]) -> ModuleDef:
    instances = []
    for inst_name, target_name, named, conns, loc in raw.instances:
        target = modules.get(target_name)
        if target is None:
            raise UnresolvedModule(target_name, loc)
        connections: list[Connection] = []
        if named:
            seen = set()
            for port_name, expr in conns:
                if target.port(port_name) is None:
                    raise UnknownPort(f"module {target_name!r} has no port {port_name!r}", loc)
                if port_name in seen:
                    raise DuplicateDeclaration(f"port {port_name!r} connected twice on {inst_name!r}", loc)
                seen.add(port_name)
                connections.append(Connection(port_name, expr))
        else:
            if len(conns) > len(target.ports):
                raise UnknownPort(
                    f"{len(conns)} positional connections for {len(target.ports)} ports of {target_name!r}", loc
                )
            connections = [Connection(p.name, expr) for p, (_, expr) in zip(target.ports, conns)]
        for conn in connections:
            if conn.expr is None:
                continue
            width = expr_width(conn.expr, module)
            expected = target.port(conn.port).width
            if width is not None and width != expected:
                raise WidthMismatch(f"connection {inst_name}.{conn.port}", expected, width, loc)
        instances.append(Instance(inst_name, target_name, tuple(connections), loc))
    return ModuleDef(
        name=module.name,
        ports=module.ports,
        nets=module.nets,
        assigns=module.assigns,
        processes=module.processes,
        instances=tuple(instances),
        loc=module.loc,
    )


def _check_acyclic(modules: dict[str, ModuleDef]) -> None:
    state: dict[str, int] = {}

    def visit(name: str, stack: list[str]) -> None:
        state[name] = 1
        stack.append(name)
        for inst in modules[name].instances:
            if state.get(inst.module) == 1:
                raise RecursionDetected(stack[stack.index(inst.module):] + [inst.module])
            if inst.module not in state:
                visit(inst.module, stack)
        stack.pop()
        state[name] = 2

    for name in modules:
        if name not in state:
            visit(name, [])


def _pick_top(modules: dict[str, ModuleDef], top: str | None) -> str:
    if top is not None:
        if top not in modules:
            raise UnresolvedModule(top)
        return top
    used = {inst.module for m in modules.values() for inst in m.instances}
    roots = [name for name in modules if name not in used]
    if len(roots) != 1:
        raise HdlError(f"cannot infer the top module; candidates: {', '.join(roots) or 'none'}")
    return roots[0]


def parse_sources(
    sources: Iterable[tuple[str, str]],
    top: str | None = None,
    allow_reserved: bool = False,
) -> Design:
    """Parse ``(filename, text)`` pairs into one checked ``Design``."""
    raws: list[_RawModule] = []
    for filename, text in sources:
        raws.extend(_Parser(tokenize(text, filename)).parse_source())
    if not raws:
        raise HdlError("no module definitions found")

    modules: dict[str, ModuleDef] = {}
    for raw in raws:
        if raw.name in modules:
            raise DuplicateDeclaration(f"module {raw.name!r} defined twice", raw.loc)
        modules[raw.name] = _build_module(raw, allow_reserved)
    for raw in raws:
        modules[raw.name] = _resolve_instances(raw, modules[raw.name], modules)
    _check_acyclic(modules)
    return Design(modules, _pick_top(modules, top))


def parse_design(
    source: str,
    top: str | None = None,
    filename: str = "<input>",
    allow_reserved: bool = False,
) -> Design:
    return parse_sources([(filename, source)], top=top, allow_reserved=allow_reserved)


def parse_files(paths: Iterable[str | Path], top: str | None = None) -> Design:
    sources = []
    for p in paths:
        try:
            sources.append((str(p), Path(p).read_text(encoding="utf-8")))
        except (OSError, UnicodeDecodeError) as exc:
            raise HdlError(f"cannot read source {p}: {exc}") from exc
    return parse_sources(sources, top=top)
