"""Exception types raised across the package.

All of them derive from :class:`ValueError` except :class:`DivergenceError`,
so ordinary ``except ValueError`` handling keeps working for bad inputs.
"""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a function."""


class DegenerateInputError(ValueError):
    """Too few samples (or an empty input) for the requested estimate."""


class ConfigError(ValueError):
    """Inconsistent or unknown configuration values."""


class NearOriginError(ValueError):
    """A sample sits (numerically) at the origin, where radii are not differentiable."""


class RankError(ValueError):
    """The empirical covariance is singular."""


class SizeError(ValueError):
    """Problem too large for an exact solver."""


class ParseError(ValueError):
    """Malformed input file.  ``line`` is 1-based, ``None`` when unknown."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DivergenceError(RuntimeError):
    """Optimization produced a non-finite or runaway value at ``step``."""

    def __init__(self, step, reason):
        super().__init__(f"divergence at step {step}: {reason}")
        self.step = step
        self.reason = reason
