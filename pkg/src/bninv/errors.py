"""Exception hierarchy shared by every module."""


class BninvError(Exception):
    """Base class for all errors raised by this package."""


class GraphError(BninvError, ValueError):
    """Malformed graph input (bad label, dangling edge, node-set mismatch)."""


class UnknownNodeError(GraphError, KeyError):
    def __init__(self, node):
        self.node = node
        super().__init__(f"unknown node {node!r}")

    def __str__(self):
        return self.args[0]


class CycleError(GraphError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("edges form a directed cycle: " + " -> ".join(map(str, self.cycle)))


class InvalidTrailError(GraphError):
    pass


class PreconditionError(BninvError, ValueError):
    """An operation was called outside the hypotheses it is defined for."""


class ResourceLimitError(BninvError):
    """A configurable enumeration or search bound would be exceeded."""


class ParseError(BninvError):
    def __init__(self, message, source="<input>", line=None, token=None):
        self.source = source
        self.line = line
        self.token = token
        where = source if line is None else f"{source}:{line}"
        detail = f" near {token!r}" if token is not None else ""
        super().__init__(f"{where}: {message}{detail}")
