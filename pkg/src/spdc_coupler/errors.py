"""Exception types shared across the package."""

__all__ = [
    "InvalidRegionError",
    "NegativeDeltaError",
    "InsufficientTabulationError",
    "InvalidEpsilonError",
    "InconsistentGeometryError",
    "KFactorDivisionError",
    "NonpositiveCountsError",
    "ConfigError",
    "ConfigParseError",
    "MissingKeyError",
    "UnknownKeyError",
    "UnitRangeError",
]


class InvalidRegionError(ValueError):
    """Integration region is malformed or has an unsupported dimension."""


class NegativeDeltaError(ValueError):
    """Relative pump bandwidth delta must be nonnegative."""


class InsufficientTabulationError(ValueError):
    """Tabulated spectral shape does not cover enough support."""


class InvalidEpsilonError(ValueError):
    """Truncation epsilon must lie strictly between 0 and 1."""


class InconsistentGeometryError(ValueError):
    """Dimensionless geometry disagrees with the physical source parameters."""


class KFactorDivisionError(ValueError):
    """Denominator K factor is zero or indistinguishable from zero."""


class NonpositiveCountsError(ValueError):
    """Measured probabilities and transmissions must be positive."""


class ConfigError(ValueError):
    """Base class for configuration file failures."""


class ConfigParseError(ConfigError):
    """Syntactically invalid configuration text."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class MissingKeyError(ConfigError):
    """A key required by the requested command is absent."""


class UnknownKeyError(ConfigError):
    """A key not recognized by the schema was supplied."""


class UnitRangeError(ConfigError):
    """A value lies outside its physically admissible range."""
