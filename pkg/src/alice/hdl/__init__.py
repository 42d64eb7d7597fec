from alice.hdl.emit import emit_expr, emit_module, emit_verilog
from alice.hdl.hierarchy import InstanceNode, InstanceTree, build_instance_tree, pin_count
from alice.hdl.model import Design, ModuleDef, Port
from alice.hdl.parser import parse_design, parse_files, parse_sources

__all__ = [
    "Design",
    "InstanceNode",
    "InstanceTree",
    "ModuleDef",
    "Port",
    "build_instance_tree",
    "emit_expr",
    "emit_module",
    "emit_verilog",
    "parse_design",
    "parse_files",
    "parse_sources",
    "pin_count",
]
