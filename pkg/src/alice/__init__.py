"""Automatic eFPGA-based redaction of Verilog designs.

The flow picks functionally relevant module instances, groups them into
clusters that fit an eFPGA, sizes a fabric for each cluster, selects the best
combination of fabrics and rewrites the design around them.
"""

from alice.config import RunConfig, load_config
from alice.errors import AliceError
from alice.flow import FlowResult, run_flow, write_artifacts
from alice.params import FlowParams, SelectPolicy
from alice.report import RunReport, emit_report

__version__ = "0.1.0"

__all__ = [
    "AliceError",
    "FlowParams",
    "FlowResult",
    "RunConfig",
    "RunReport",
    "SelectPolicy",
    "emit_report",
    "load_config",
    "run_flow",
    "write_artifacts",
]
