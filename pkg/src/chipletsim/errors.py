"""Exception hierarchy shared by every engine.

All errors carry a machine-readable ``kind`` so the CLI can emit a
structured record on stderr.
"""


class SimError(Exception):
    kind = "SimError"

    def __init__(self, message, **details):
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self):
        out = {"error": self.kind, "message": self.message}
        out.update(self.details)
        return out


# network / config ingest
class MalformedRow(SimError):
    kind = "MalformedRow"

    def __init__(self, message, line, column=None):
        super().__init__(f"line {line}: {message}", line=line, column=column)
        self.line = line
        self.column = column


class InvalidValue(SimError):
    kind = "InvalidValue"


class EmptyNetwork(SimError):
    kind = "EmptyNetwork"


class UnknownKey(SimError):
    kind = "UnknownKey"


class MissingRequiredKey(SimError):
    kind = "MissingRequiredKey"


class InconsistentMode(SimError):
    kind = "InconsistentMode"


# mapping
class ChipletBudgetExceeded(SimError):
    kind = "ChipletBudgetExceeded"


# circuit
class MissingComponent(SimError):
    kind = "MissingComponent"


# interconnect
class NodeOutOfRange(SimError):
    kind = "NodeOutOfRange"


class DeadlockDetected(SimError):
    kind = "DeadlockDetected"


# cost
class AreaTooLarge(SimError):
    kind = "AreaTooLarge"
