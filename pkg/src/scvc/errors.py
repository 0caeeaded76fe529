"""Exception hierarchy shared by every stage of the pipeline."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: int = 0
    column: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.column}: {self.severity}: {self.message}"


class ScvcError(Exception):
    """Base class for all errors raised by scvc."""


class ModelError(ScvcError):
    """The input text does not describe a well-formed statechart."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


class ExprSyntaxError(ScvcError):
    def __init__(self, message: str, offset: int = 0):
        self.offset = offset
        super().__init__(message)


class ExprTypeError(ScvcError):
    pass


class CyclicBroadcast(ScvcError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cyclic broadcast: " + " -> ".join(self.cycle))


class UnknownBroadcast(ScvcError):
    def __init__(self, event: str):
        self.event = event
        super().__init__(f"broadcast of unknown event {event}")


class SpontaneousCycle(ScvcError):
    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("cycle of spontaneous transitions: " + " -> ".join(self.cycle))


class WriteConflict(ScvcError):
    def __init__(self, variable: str):
        self.variable = variable
        super().__init__(f"parallel branches both assign {variable}")


class UnsupportedNode(ScvcError):
    pass


class SolverSpawnError(ScvcError):
    pass


class SolverOutputParseError(ScvcError):
    def __init__(self, message: str, raw: str):
        self.raw = raw
        super().__init__(message)


class PathDisagreement(ScvcError):
    pass
