"""Exception types shared across the codesign engine."""


class CodesignError(Exception):
    """Base class for every error raised by the engine."""


class ModelError(CodesignError):
    """Structural problems with the system model or its serialized forms."""


class XmlSyntaxError(ModelError):
    pass


class IrSyntaxError(ModelError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


class DuplicateNodeError(ModelError):
    pass


class DuplicateEdgeError(ModelError):
    pass


class InvalidNodeNameError(ModelError):
    pass


class BadAttributeError(ModelError):
    pass


class UnknownNodeRefError(ModelError):
    pass


class BadGateExprError(ModelError):
    pass


class KOutOfRangeError(ModelError):
    pass


class CycleDetectedError(ModelError):
    def __init__(self, cycle: list[str]):
        self.cycle = list(cycle)
        super().__init__("cycle detected: " + " --> ".join(self.cycle + self.cycle[:1]))


class NameCollisionError(ModelError):
    pass


class AnalysisError(CodesignError):
    """Errors raised while running a safety analysis."""


class NoStartOrEndError(AnalysisError):
    pass


class AgentError(CodesignError):
    """Errors raised by the chat agent layer."""


class UnresolvedReferenceError(AgentError):
    pass


class BackendUnavailableError(AgentError):
    pass


class OffMenuExhaustedError(AgentError):
    pass


class ConfigError(CodesignError):
    """Bad service or decision-network configuration."""
