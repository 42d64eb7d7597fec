"""Design-wide dataflow graph and output-cone queries.

Nodes are ``(scope, signal)`` pairs where ``scope`` is an instance path. A
child's port is the same node seen from the child (its internal signal) and
from the parent (the connection endpoint), which is what stitches the
per-module graphs into one design-wide graph.

Dependence is conservative: every signal a process reads may affect every
signal it writes, and every input of an instance may affect every one of its
outputs. Clock and asynchronous reset nets carry no dependence.
"""

from __future__ import annotations

import logging
from collections import deque
from dataclasses import dataclass, field

from alice.errors import UnknownOutput
from alice.params import DIRECT, TRANSITIVE
from alice.hdl.hierarchy import InstanceTree, is_ancestor
from alice.hdl.model import (
    INOUT,
    INPUT,
    OUTPUT,
    Design,
    lvalue_index_reads,
    lvalue_targets,
    signals_read,
    stmt_reads,
    stmt_writes,
)

log = logging.getLogger(__name__)

Node = tuple[str, str]


class DanglingConnection(UserWarning):
    """A signal is read but nothing drives it."""


@dataclass
class DataflowGraph:
    design: Design
    tree: InstanceTree
    succ: dict[Node, set[Node]] = field(default_factory=dict)
    pred: dict[Node, set[Node]] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def add_node(self, node: Node) -> None:
        self.succ.setdefault(node, set())
        self.pred.setdefault(node, set())

    def add_edge(self, src: Node, dst: Node) -> None:
        if src == dst:
            return
        self.add_node(src)
        self.add_node(dst)
        self.succ[src].add(dst)
        self.pred[dst].add(src)

    @property
    def nodes(self) -> list[Node]:
        return sorted(self.succ)

    def edges(self) -> list[tuple[Node, Node]]:
        return sorted((src, dst) for src, dsts in self.succ.items() for dst in dsts)

    def output_ports(self, path: str) -> list[Node]:
        module = self.design.modules[self.tree.module_of(path)]
        return [(path, p.name) for p in module.ports if p.direction in (OUTPUT, INOUT)]

    def to_dot(self) -> str:
        def label(node: Node) -> str:
            return f'"{node[0]}:{node[1]}"'

        lines = ["digraph dataflow {"]
        for node in self.nodes:
            lines.append(f"  {label(node)};")
        for src, dst in self.edges():
            lines.append(f"  {label(src)} -> {label(dst)};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def timing_signals(design: Design) -> dict[str, set[str]]:
    """Per module: signals acting as clock or asynchronous reset.

    A signal qualifies if it appears with an edge in a sensitivity list, or
    if it feeds a child port that qualifies in the child module.
    """
    result: dict[str, set[str]] = {}

    def visit(name: str) -> set[str]:
        if name in result:
            return result[name]
        module = design.modules[name]
        timing = set(module.timing_signals)
        for inst in module.instances:
            child_timing = visit(inst.module)
            for conn in inst.connections:
                if conn.port in child_timing and conn.expr is not None:
                    timing |= signals_read(conn.expr)
        result[name] = timing
        return timing

    for name in design.modules:
        visit(name)
    return result


def build_dataflow_graph(design: Design, tree: InstanceTree) -> DataflowGraph:
    graph = DataflowGraph(design, tree)
    timing = timing_signals(design)
    driven: set[Node] = set()
    used: set[Node] = set()

    for path in tree:
        module = design.modules[tree.module_of(path)]
        quiet = timing[module.name]

        def link(src: str, dst_node: Node) -> None:
            used.add((path, src))
            if src not in quiet:
                graph.add_edge((path, src), dst_node)

        for sig in [p.name for p in module.ports] + [n.name for n in module.nets]:
            graph.add_node((path, sig))
        if path == tree.root:
            driven.update((path, p.name) for p in module.ports if p.direction in (INPUT, INOUT))

        for assign in module.assigns:
            reads = signals_read(assign.rhs) | lvalue_index_reads(assign.lhs)
            for target in lvalue_targets(assign.lhs):
                driven.add((path, target))
                for src in reads:
                    link(src, (path, target))
            used.update((path, s) for s in reads)

        for proc in module.processes:
            reads = stmt_reads(proc.body)
            for target in stmt_writes(proc.body):
                driven.add((path, target))
                for src in reads:
                    link(src, (path, target))
            used.update((path, s) for s in reads)

        for inst in module.instances:
            child = f"{path}.{inst.name}"
            child_mod = design.modules[inst.module]
            child_quiet = timing[child_mod.name]
            ins = [p.name for p in child_mod.ports if p.direction in (INPUT, INOUT)]
            outs = [p.name for p in child_mod.ports if p.direction in (OUTPUT, INOUT)]
            # Black-box closure: any input may affect any output.
            for i in ins:
                if i in child_quiet:
                    continue
                for o in outs:
                    graph.add_edge((child, i), (child, o))
            for conn in inst.connections:
                port = child_mod.port(conn.port)
                if conn.expr is None:
                    continue
                if port.direction in (INPUT, INOUT):
                    driven.add((child, port.name))
                    reads = signals_read(conn.expr)
                    used.update((path, s) for s in reads)
                    for src in reads:
                        link(src, (child, port.name))
                if port.direction in (OUTPUT, INOUT):
                    used.add((child, port.name))
                    targets = lvalue_targets(conn.expr) or signals_read(conn.expr)
                    for target in targets:
                        driven.add((path, target))
                        if port.name not in child_quiet:
                            graph.add_edge((child, port.name), (path, target))

    for node in sorted(used - driven):
        scope, sig = node
        if sig in timing[tree.module_of(scope)]:
            continue
        message = f"signal {sig!r} in {scope} is read but never driven"
        graph.warnings.append(message)
        log.warning("%s", DanglingConnection(message))
    return graph


def _top_output(graph: DataflowGraph, output: str) -> Node:
    top = graph.design.modules[graph.design.top]
    port = top.port(output)
    if port is None or port.direction not in (OUTPUT, INOUT):
        raise UnknownOutput(output)
    return (graph.tree.root, output)


def affecting_instances(graph: DataflowGraph, output: str, impact: str = TRANSITIVE) -> list[str]:
    """Instances with a dataflow path from one of their outputs to top-level ``output``.

    ``impact="direct"`` only admits paths that stay in the scopes of the
    instance itself and its ancestors, i.e. paths that do not pass through
    any other instance.
    """
    target = _top_output(graph, output)
    if impact == TRANSITIVE:
        reached = {target}
        queue = deque([target])
        while queue:
            node = queue.popleft()
            for src in graph.pred.get(node, ()):
                if src not in reached:
                    reached.add(src)
                    queue.append(src)
        return [
            path for path in graph.tree.instances()
            if any(node in reached for node in graph.output_ports(path))
        ]
    if impact == DIRECT:
        return [path for path in graph.tree.instances() if _reaches_directly(graph, path, target)]
    raise ValueError(f"unknown impact mode {impact!r}")


def _reaches_directly(graph: DataflowGraph, path: str, target: Node) -> bool:
    def allowed(node: Node) -> bool:
        return node[0] == path or is_ancestor(node[0], path)

    start = graph.output_ports(path)
    seen = set(start)
    queue = deque(start)
    while queue:
        node = queue.popleft()
        if node == target:
            return True
        for dst in graph.succ.get(node, ()):
            if dst not in seen and allowed(dst):
                seen.add(dst)
                queue.append(dst)
    return False
