"""Exception hierarchy shared by every phase of the flow."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SourceLoc:
    """Position of a construct in a Verilog source file (1-based)."""

    file: str
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.col}"


class AliceError(Exception):
    """Base class for all errors raised by the flow."""


class HdlError(AliceError):
    """Error detected while reading or checking Verilog input."""

    def __init__(self, message: str, loc: SourceLoc | None = None):
        self.message = message
        self.loc = loc
        super().__init__(f"{loc}: {message}" if loc else message)


class VerilogSyntaxError(HdlError):
    def __init__(self, expected: str, found: str, loc: SourceLoc | None = None):
        self.expected = expected
        self.found = found
        super().__init__(f"expected {expected}, found {found!r}", loc)


class UnsupportedConstruct(HdlError):
    def __init__(self, construct: str, loc: SourceLoc | None = None):
        self.construct = construct
        super().__init__(f"unsupported construct: {construct}", loc)


class UnresolvedModule(HdlError):
    def __init__(self, name: str, loc: SourceLoc | None = None):
        self.name = name
        super().__init__(f"instance of undeclared module {name!r}", loc)


class UndeclaredSignal(HdlError):
    def __init__(self, name: str, module: str, loc: SourceLoc | None = None):
        self.name = name
        self.module = module
        super().__init__(f"signal {name!r} is not declared in module {module!r}", loc)


class DuplicateDeclaration(HdlError):
    pass


class UnknownPort(HdlError):
    pass


class WidthMismatch(HdlError):
    def __init__(self, what: str, expected: int, actual: int, loc: SourceLoc | None = None):
        self.expected = expected
        self.actual = actual
        super().__init__(f"width mismatch on {what}: expected {expected}, got {actual}", loc)


class ReservedIdentifier(HdlError):
    pass


class RecursionDetected(HdlError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("recursive instantiation: " + " -> ".join(cycle))


class UnknownOutput(AliceError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"{name!r} is not an output of the top module")


class EmptyCandidateSet(AliceError):
    def __init__(self, message: str = "no candidate redaction module satisfies the structural constraints"):
        super().__init__(message)


class ClusterLimitExceeded(AliceError):
    pass


class UnsupportedExpression(AliceError):
    def __init__(self, operator: str, module: str):
        self.operator = operator
        self.module = module
        super().__init__(f"operator {operator!r} in module {module!r} has no resource cost")


class Infeasible(AliceError):
    """No fabric width in the permitted range satisfies the estimate.

    ``constraint`` names the binding resource: ``"io"`` or ``"logic"``.
    """

    def __init__(self, constraint: str, detail: str = ""):
        self.constraint = constraint
        super().__init__(f"no admissible fabric ({constraint} bound){': ' + detail if detail else ''}")


class ReportParseError(AliceError):
    pass


class ReportSchemaError(AliceError):
    pass


class NoSolution(AliceError):
    def __init__(self, message: str = "no admissible eFPGA solution"):
        super().__init__(message)


class AssignmentOverflow(AliceError):
    def __init__(self, pins: int, capacity: int):
        self.pins = pins
        self.capacity = capacity
        super().__init__(f"{pins} pins assigned to a fabric with {capacity} GPIOs")


class RedactionError(AliceError):
    pass


class ConfigError(AliceError):
    pass


class ConfigMissingKey(ConfigError):
    def __init__(self, key: str):
        self.key = key
        super().__init__(f"missing required configuration key {key!r}")


class ConfigTypeError(ConfigError):
    pass


class ConfigRangeError(ConfigError):
    pass


class FlowError(AliceError):
    """An upstream error annotated with the flow phase that raised it."""

    def __init__(self, phase: str, cause: Exception):
        self.phase = phase
        self.cause = cause
        super().__init__(f"[{phase}] {cause}")
