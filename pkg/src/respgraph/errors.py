"""Exception hierarchy shared by all respgraph modules."""

from __future__ import annotations


class RespGraphError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(RespGraphError, ValueError):
    """Input data or configuration failed validation (CLI exit code 1)."""


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}"
        if line is not None:
            where += f":{line}" if where else f"line {line}"
        super().__init__(f"{where}: {message}" if where else message)


class IntegrityError(ValidationError):
    """A trace invariant does not hold; ``invariant`` names which one."""

    def __init__(self, invariant: str, detail: str):
        self.invariant = invariant
        super().__init__(f"{invariant}: {detail}")


class ConfigError(ValidationError):
    pass


class DegenerateInput(ValidationError):
    pass


class InsufficientData(ValidationError):
    pass


class DegenerateSupport(ValidationError):
    pass


class NonPositiveSample(ValidationError):
    pass


class NonPositiveVariance(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


class ZeroVariance(ValidationError):
    pass


class SourceError(RespGraphError):
    """A data-source query failed; carries the query that triggered it."""

    def __init__(self, query: str, detail: str):
        self.query = query
        super().__init__(f"{query}: {detail}")


class ExhaustedDictionary(ValidationError):
    """Tag searches ran out of words before enough seed candidates were found."""
