"""Rewrite the design around the selected eFPGAs.

For every fabric of the solution the member instances are deleted, a
black-box wrapper is instantiated at the deepest common ancestor of the
members, and each former member pin is carried to a wrapper GPIO through a
fresh net ``alice_r<id>_<instance>_<port>``. Members that sit below the
insertion point get that net routed up through new ports on every module in
between.

All wrappers share one configuration chain. The top module gains exactly
``cfg_clk``, ``cfg_en``, ``cfg_in`` and ``cfg_out``; ``cfg_in`` enters the
first fabric, each fabric's ``cfg_out`` feeds the next one's ``cfg_in`` and
the last one drives the top ``cfg_out``. Modules between the top and an
insertion point get ``alice_c<id>_{clk,en,in,out}`` ports for this.

A module definition that must change at one place of the hierarchy but is
also instantiated elsewhere is cloned as ``alice_<module>_<k>``, so the other
instances keep their original definition. Definitions no longer reachable
from the top are dropped; the redacted logic does not leak into the output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from alice.errors import AssignmentOverflow, RedactionError
from alice.fabric import FabricImpl
from alice.hdl.emit import emit_verilog
from alice.hdl.hierarchy import InstanceTree, parent_path
from alice.hdl.model import (
    INOUT,
    INPUT,
    OUTPUT,
    Assign,
    Concat,
    Connection,
    Design,
    Expr,
    Ident,
    Index,
    Instance,
    ModuleDef,
    Net,
    Number,
    Port,
    Range,
    Slice,
    lvalue_targets,
)
from alice.hdl.parser import parse_design
from alice.selection import Solution

CONFIG_PORTS = ("cfg_clk", "cfg_en", "cfg_in", "cfg_out")


@dataclass(frozen=True)
class GpioPin:
    signal: str  # e.g. gcd_top.u_dp.u_sub.a[3]
    bus: str  # gpio_in or gpio_out
    index: int

    @property
    def target(self) -> str:
        return f"{self.bus}[{self.index}]"


@dataclass(frozen=True)
class GpioAssignment:
    inputs: tuple[GpioPin, ...] = ()
    outputs: tuple[GpioPin, ...] = ()

    def __len__(self) -> int:
        return len(self.inputs) + len(self.outputs)

    def as_map(self) -> dict[str, str]:
        return {pin.signal: pin.target for pin in self.inputs + self.outputs}


@dataclass
class RedactedDesign:
    design: Design
    wrappers: list[ModuleDef]
    manifest: dict[str, dict]

    def top_verilog(self) -> str:
        """The rewritten design without the wrapper stubs."""
        stubs = {w.name for w in self.wrappers}
        return emit_verilog(self.design, [m for m in self.design.modules if m not in stubs])

    def stub_verilog(self) -> dict[str, str]:
        """Stub file name -> text, one per fabric."""
        out = {}
        for fid, entry in self.manifest.items():
            out[f"efpga_{fid}_stub.v"] = emit_verilog(self.design, [entry["module"]])
        return out

    def manifest_json(self) -> str:
        return json.dumps(self.manifest, indent=2) + "\n"


# -- helpers ---------------------------------------------------------------------


def insertion_point(members, tree: InstanceTree | None = None) -> str:
    """Lowest common ancestor of the members' parent instances."""
    parents = [parent_path(m) for m in getattr(members, "members", members)]
    if not parents or any(p is None for p in parents):
        raise RedactionError("the top module itself cannot be redacted")
    split = [p.split(".") for p in parents]
    common: list[str] = []
    for parts in zip(*split):
        if len(set(parts)) != 1:
            break
        common.append(parts[0])
    return ".".join(common)


def _range(width: int) -> Range | None:
    return Range(width - 1, 0) if width > 1 else None


def _bit_names(port: Port) -> list[str]:
    """Per-bit names from bit 0 of the routed net upward."""
    if port.range is None:
        return [port.name]
    step = 1 if port.range.msb >= port.range.lsb else -1
    return [f"{port.name}[{port.range.lsb + step * j}]" for j in range(port.width)]


def _is_lvalue(expr: Expr) -> bool:
    if isinstance(expr, (Ident, Index, Slice)):
        return True
    if isinstance(expr, Concat):
        return all(_is_lvalue(item) for item in expr.items)
    return False


def _relname(member: str, anchor: str) -> str:
    return member[len(anchor) + 1:].replace(".", "_")


def generate_efpga_wrapper(f: FabricImpl, assignment: GpioAssignment, fid: int = 0) -> ModuleDef:
    """Black-box stub: GPIO buses sized to the assignment plus the configuration ports."""
    if len(assignment) > f.io_capacity:
        raise AssignmentOverflow(len(assignment), f.io_capacity)
    ports = []
    if assignment.inputs:
        ports.append(Port("gpio_in", INPUT, _range(len(assignment.inputs))))
    if assignment.outputs:
        ports.append(Port("gpio_out", OUTPUT, _range(len(assignment.outputs))))
    ports += [
        Port("cfg_clk", INPUT),
        Port("cfg_en", INPUT),
        Port("cfg_in", INPUT),
        Port("cfg_out", OUTPUT),
    ]
    return ModuleDef(name=f"efpga_{f.w}x{f.w}_{fid}", ports=tuple(ports))


# -- rewriting ------------------------------------------------------------------


@dataclass
class _Edit:
    """Mutable copy of one module definition, specific to one instance path."""

    module: ModuleDef
    ports: list[Port] = field(default_factory=list)
    nets: list[Net] = field(default_factory=list)
    assigns: list[Assign] = field(default_factory=list)
    instances: dict[str, Instance] = field(default_factory=dict)

    @classmethod
    def of(cls, module: ModuleDef) -> "_Edit":
        return cls(
            module,
            list(module.ports),
            list(module.nets),
            list(module.assigns),
            {inst.name: inst for inst in module.instances},
        )

    def connect(self, inst_name: str, port: str, expr: Expr) -> None:
        inst = self.instances[inst_name]
        self.instances[inst_name] = replace(inst, connections=inst.connections + (Connection(port, expr),))

    def declared(self, name: str) -> bool:
        return any(p.name == name for p in self.ports) or any(n.name == name for n in self.nets)

    def build(self, name: str) -> ModuleDef:
        return replace(
            self.module,
            name=name,
            ports=tuple(self.ports),
            nets=tuple(self.nets),
            assigns=tuple(self.assigns),
            instances=tuple(self.instances.values()),
        )


class _Rewriter:
    def __init__(self, design: Design, tree: InstanceTree):
        self.design = design
        self.tree = tree
        self.edits: dict[str, _Edit] = {}

    def edit(self, path: str) -> _Edit:
        if path not in self.edits:
            self.edits[path] = _Edit.of(self.design.modules[self.tree.module_of(path)])
        return self.edits[path]

    def chain(self, anchor: str, path: str) -> list[str]:
        """Instance paths strictly below ``anchor`` down to ``path`` inclusive."""
        out = []
        while path != anchor:
            out.append(path)
            path = parent_path(path)
        return out[::-1]

    def route(self, anchor: str, scope: str, name: str, width: int, direction: str) -> None:
        """Carry net ``name`` between ``anchor`` and ``scope`` through new ports.

        ``direction`` is the port direction on the modules below the anchor:
        ``output`` carries data up towards the wrapper, ``input`` down from it.
        """
        top = self.edit(anchor)
        if top.declared(name):
            raise RedactionError(f"routed net {name} collides with an existing declaration in {anchor}")
        top.nets.append(Net(name, "wire", _range(width)))
        for node in self.chain(anchor, scope):
            ed = self.edit(node)
            if ed.declared(name):
                raise RedactionError(f"routed port {name} collides with an existing declaration in {node}")
            ed.ports.append(Port(name, direction, _range(width)))
            self.edit(parent_path(node)).connect(node.rpartition(".")[2], name, Ident(name))

    def redact_fabric(self, fid: int, fabric: FabricImpl) -> tuple[str, GpioAssignment, list[Expr], list[Expr]]:
        anchor = insertion_point(fabric.cluster.members)
        ins: list[GpioPin] = []
        outs: list[GpioPin] = []
        in_nets: list[Expr] = []
        out_nets: list[Expr] = []
        for member in sorted(fabric.cluster.members):
            scope = parent_path(member)
            inst_name = member.rpartition(".")[2]
            ed = self.edit(scope)
            inst = ed.instances.pop(inst_name)
            module = self.design.modules[inst.module]
            for port in module.ports:
                if port.direction == INOUT:
                    raise RedactionError(f"inout port {member}.{port.name} cannot be mapped onto eFPGA GPIO")
                net = f"alice_r{fid}_{_relname(member, anchor)}_{port.name}"
                expr = inst.connection(port.name)
                if port.direction == INPUT:
                    self.route(anchor, scope, net, port.width, OUTPUT)
                    value = expr if expr is not None else Number(f"{port.width}'d0", port.width)
                    ed.assigns.append(Assign(Ident(net), value))
                    for bit in _bit_names(port):
                        ins.append(GpioPin(f"{member}.{bit}", "gpio_in", len(ins)))
                    in_nets.append(Ident(net))
                else:
                    self.route(anchor, scope, net, port.width, INPUT)
                    if expr is not None:
                        if not _is_lvalue(expr) or not lvalue_targets(expr):
                            raise RedactionError(f"output {member}.{port.name} drives a non-net expression")
                        ed.assigns.append(Assign(expr, Ident(net)))
                    for bit in _bit_names(port):
                        outs.append(GpioPin(f"{member}.{bit}", "gpio_out", len(outs)))
                    out_nets.append(Ident(net))
        return anchor, GpioAssignment(tuple(ins), tuple(outs)), in_nets, out_nets


def _bus(nets: list[Expr]) -> Expr:
    # Concatenation lists the most significant part first; gpio index 0 is the first pin.
    return nets[0] if len(nets) == 1 else Concat(tuple(reversed(nets)))


def redact_design(design: Design, solution: Solution, tree: InstanceTree) -> RedactedDesign:
    if not solution.fabrics:
        raise RedactionError("cannot redact with an empty solution")
    top = design.modules[design.top]
    for name in CONFIG_PORTS:
        if top.port(name) or top.net(name):
            raise RedactionError(f"top module already declares {name!r}; the configuration chain needs it")

    rw = _Rewriter(design, tree)
    fabrics = sorted(solution.fabrics, key=lambda f: f.key)
    root = tree.root
    root_ed = rw.edit(root)
    root_ed.ports += [
        Port("cfg_clk", INPUT),
        Port("cfg_en", INPUT),
        Port("cfg_in", INPUT),
        Port("cfg_out", OUTPUT),
    ]

    wrappers: list[ModuleDef] = []
    manifest: dict[str, dict] = {}
    for fid, fabric in enumerate(fabrics):
        anchor, assignment, in_nets, out_nets = rw.redact_fabric(fid, fabric)
        wrapper = generate_efpga_wrapper(fabric, assignment, fid)
        if wrapper.name in design.modules:
            raise RedactionError(f"module name {wrapper.name} is already taken")
        wrappers.append(wrapper)

        # Configuration chain endpoints as seen from the top.
        chain_in = "cfg_in" if fid == 0 else f"alice_cfg_link{fid}"
        chain_out = "cfg_out" if fid == len(fabrics) - 1 else f"alice_cfg_link{fid + 1}"
        if fid < len(fabrics) - 1:
            root_ed.nets.append(Net(chain_out, "wire"))
        cfg = {"cfg_clk": "cfg_clk", "cfg_en": "cfg_en", "cfg_in": chain_in, "cfg_out": chain_out}
        if anchor != root:
            local = {p: f"alice_c{fid}_{p[4:]}" for p in CONFIG_PORTS}
            for node in rw.chain(root, anchor):
                ed = rw.edit(node)
                for port in CONFIG_PORTS:
                    ed.ports.append(Port(local[port], OUTPUT if port == "cfg_out" else INPUT))
                outer = cfg if parent_path(node) == root else local
                for port in CONFIG_PORTS:
                    rw.edit(parent_path(node)).connect(node.rpartition(".")[2], local[port], Ident(outer[port]))
            cfg = local

        connections = []
        if in_nets:
            connections.append(Connection("gpio_in", _bus(in_nets)))
        if out_nets:
            connections.append(Connection("gpio_out", _bus(out_nets)))
        connections += [Connection(p, Ident(cfg[p])) for p in CONFIG_PORTS]
        inst_name = f"alice_efpga_{fid}"
        anchor_ed = rw.edit(anchor)
        if inst_name in anchor_ed.instances:
            raise RedactionError(f"instance name {inst_name} is already taken in {anchor}")
        anchor_ed.instances[inst_name] = Instance(inst_name, wrapper.name, tuple(connections))

        manifest[str(fid)] = {
            "module": wrapper.name,
            "size": fabric.size,
            "insertion_point": anchor,
            "instance": f"{anchor}.{inst_name}",
            "members": sorted(fabric.cluster.members),
            "gpio_in": len(assignment.inputs),
            "gpio_out": len(assignment.outputs),
            "pins": assignment.as_map(),
        }

    modules = _assemble(design, tree, rw.edits)
    for wrapper in wrappers:
        modules[wrapper.name] = wrapper
    text = emit_verilog(Design(modules, design.top))
    # Normalise through the parser; this also checks the result is well formed.
    rewritten = parse_design(text, top=design.top, filename="redacted_top.v", allow_reserved=True)
    return RedactedDesign(rewritten, wrappers, manifest)


def _assemble(design: Design, tree: InstanceTree, edits: dict[str, _Edit]) -> dict[str, ModuleDef]:
    """Name the edited modules (cloning shared ones) and drop unreachable definitions."""
    uses: dict[str, int] = {}
    for path in tree:
        uses[tree.module_of(path)] = uses.get(tree.module_of(path), 0) + 1

    names: dict[str, str] = {}
    counters: dict[str, int] = {}
    for path in sorted(edits):
        module = tree.module_of(path)
        if uses[module] > 1:
            k = counters.get(module, 0)
            counters[module] = k + 1
            names[path] = f"alice_{module}_{k}"
        else:
            names[path] = module

    # Point edited parents at their (possibly cloned) edited children.
    for path, ed in edits.items():
        for inst_name, inst in list(ed.instances.items()):
            child = f"{path}.{inst_name}"
            if child in names:
                ed.instances[inst_name] = replace(inst, module=names[child])

    modules = dict(design.modules)
    for path, ed in edits.items():
        modules[names[path]] = ed.build(names[path])

    reachable: set[str] = set()
    stack = [design.top]
    while stack:
        name = stack.pop()
        if name in reachable or name not in modules:
            continue
        reachable.add(name)
        stack.extend(inst.module for inst in modules[name].instances)
    return {name: mod for name, mod in modules.items() if name in reachable}
