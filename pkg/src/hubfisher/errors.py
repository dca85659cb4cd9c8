"""Exception hierarchy shared by all hubfisher modules."""

from __future__ import annotations


class HubFisherError(Exception):
    """Base class for user-facing errors (CLI exit code 1)."""


class ConfigError(HubFisherError, ValueError):
    pass


class TraceError(HubFisherError, ValueError):
    pass


class MalformedRow(TraceError):
    def __init__(self, line: int, reason: str):
        self.line = line
        super().__init__(f"line {line}: {reason}")


class MissingEntity(TraceError):
    pass


class DuplicateSample(TraceError):
    pass


class RosterViolation(TraceError):
    pass


class LengthMismatch(HubFisherError, ValueError):
    pass


class SeriesTooShort(HubFisherError, ValueError):
    pass


class InconsistentGames(HubFisherError, ValueError):
    pass


class GridTooSmall(HubFisherError, ValueError):
    pass


class EmptyEnsemble(HubFisherError, ValueError):
    pass
