"""Elaborated instance hierarchy of a design."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from alice.errors import RecursionDetected
from alice.hdl.model import Design, ModuleDef


def pin_count(module: ModuleDef) -> int:
    """Total I/O pins of a module: the sum of all port widths, any direction."""
    return sum(port.width for port in module.ports)


def parent_path(path: str) -> str | None:
    head, sep, _ = path.rpartition(".")
    return head if sep else None


def is_ancestor(ancestor: str, path: str) -> bool:
    """Strict ancestry on dot-separated instance paths."""
    return path.startswith(ancestor + ".")


def related(a: str, b: str) -> bool:
    """True when ``a`` and ``b`` are the same instance or one contains the other."""
    return a == b or is_ancestor(a, b) or is_ancestor(b, a)


@dataclass(frozen=True)
class InstanceNode:
    path: str
    module: str
    parent: str | None
    children: tuple[str, ...]

    @property
    def name(self) -> str:
        return self.path.rpartition(".")[2]


class InstanceTree:
    """Tree of elaborated instances rooted at the top module.

    Paths are dot-separated and start with the top module name, e.g.
    ``gcd_top.u_dp.u_sub``.
    """

    def __init__(self, nodes: dict[str, InstanceNode], root: str):
        self.nodes = nodes
        self.root = root

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, path: object) -> bool:
        return path in self.nodes

    def __iter__(self) -> Iterator[str]:
        return iter(self.nodes)

    def __getitem__(self, path: str) -> InstanceNode:
        return self.nodes[path]

    def module_of(self, path: str) -> str:
        return self.nodes[path].module

    def parent(self, path: str) -> str | None:
        return self.nodes[path].parent

    def children(self, path: str) -> tuple[str, ...]:
        return self.nodes[path].children

    def instances(self) -> list[str]:
        """Every non-root instance path, sorted."""
        return sorted(p for p in self.nodes if p != self.root)

    def ancestors(self, path: str) -> list[str]:
        out = []
        current = self.nodes[path].parent
        while current is not None:
            out.append(current)
            current = self.nodes[current].parent
        return out

    def descendants(self, path: str) -> list[str]:
        out = []
        stack = list(reversed(self.nodes[path].children))
        while stack:
            p = stack.pop()
            out.append(p)
            stack.extend(reversed(self.nodes[p].children))
        return out

    def is_ancestor(self, a: str, b: str) -> bool:
        return a in self.ancestors(b)

    def independent(self, a: str, b: str) -> bool:
        return a != b and not self.is_ancestor(a, b) and not self.is_ancestor(b, a)


def build_instance_tree(design: Design) -> InstanceTree:
    nodes: dict[str, InstanceNode] = {}

    def visit(path: str, module: str, parent: str | None, stack: tuple[str, ...]) -> None:
        if module in stack:
            raise RecursionDetected(list(stack[stack.index(module):]) + [module])
        mod = design.modules[module]
        children = tuple(f"{path}.{inst.name}" for inst in mod.instances)
        nodes[path] = InstanceNode(path, module, parent, children)
        for inst, child in zip(mod.instances, children):
            visit(child, inst.module, path, stack + (module,))

    visit(design.top, design.top, None, ())
    return InstanceTree(nodes, design.top)
