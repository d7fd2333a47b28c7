"""Exception hierarchy shared by all submodules."""


class QuboError(Exception):
    """Base class for all errors raised by qubokit."""


class InstanceError(QuboError, ValueError):
    """Invalid weight matrix or mismatched vector length."""


class ResourceCapError(QuboError):
    """An exhaustive computation would exceed a configured size cap."""

    def __init__(self, what: str, n: int, cap: int):
        super().__init__(f"{what}: n={n} exceeds the configured cap of {cap}")
        self.n = n
        self.cap = cap


class ParseError(QuboError, ValueError):
    """Malformed expression text. ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ConflictError(ParseError):
    """Contradictory constraints, e.g. ``x1 = 0; x1 = 1``."""

    def __init__(self, message: str, variables=(), position: int | None = None):
        super().__init__(message, position)
        self.variables = tuple(variables)


class FormatError(QuboError, ValueError):
    """Corrupt or unsupported binary instance file."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (at byte offset {offset})"
        super().__init__(message)
        self.offset = offset
