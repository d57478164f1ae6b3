"""
Exception hierarchy shared by the synthesis packages and the CLI.
main.py maps these onto exit codes (spec errors 2, resource caps 3).
"""
from typing import Optional


class PolysynthError(Exception):
    """Base class for every error raised on purpose by this project."""


class SpecError(PolysynthError):
    """A function specification could not be built: bad PLA, bad generator, arity mismatch."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PlaFormatError(SpecError):
    pass


class NetlistFormatError(PolysynthError):
    """Netlist JSON that does not parse or does not match schema version 1."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ResourceLimitExceeded(PolysynthError):
    """Recursion depth, cell count or watchdog cap hit during synthesis."""


class TransformInvariantError(PolysynthError):
    """Mode-variable elimination left the netlist in a state that signals a bug."""
