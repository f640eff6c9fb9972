"""Exception hierarchy.

Everything raised on purpose by the package derives from `BellSynthError`,
so callers (and the CLI) can separate physics/domain failures from bugs.
"""


class BellSynthError(Exception):
    """Base class for all package errors."""


class DomainError(BellSynthError, ValueError):
    """An argument lies outside the domain where the model is defined."""


class InvariantError(BellSynthError, ValueError):
    """A value violates a structural invariant (e.g. a non-PSD density matrix)."""


class ResolutionError(BellSynthError, ValueError):
    """A numerical grid is too coarse or too short for the requested physics."""


class ShiftRangeError(BellSynthError, ValueError):
    """A delay exceeds the range representable on the time grid."""


class MisuseError(BellSynthError, TypeError):
    """An operation was called with an incompatible kind of input."""


class ConfigError(BellSynthError):
    """A configuration file could not be parsed or validated.

    Parameters
    ----------
    message : str
        Human readable description.
    line : int, optional
        1-based line number in the config file.
    key : str, optional
        Offending key, if known.
    """

    def __init__(self, message, line=None, key=None):
        self.line = line
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
