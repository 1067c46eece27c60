"""Exception hierarchy shared across the package."""


class FeatherwingError(Exception):
    """Base class for all package-specific errors."""


class DomainError(FeatherwingError, ValueError):
    """An argument lies outside the physical domain of an operation."""


class ParameterError(FeatherwingError, ValueError):
    """A structural parameter (count, shape, option name) is invalid."""


class ModelError(FeatherwingError):
    """The assembled model is unusable (e.g. mass matrix not invertible)."""


class NumericError(FeatherwingError):
    """A numerical procedure produced or encountered non-finite values."""


class DivergenceError(NumericError):
    """Simulated state blew up; carries the time and norm at failure."""

    def __init__(self, t: float, norm: float):
        super().__init__(f"state diverged at t={t:.6g} (|x|={norm:.6g})")
        self.t = t
        self.norm = norm


class BracketError(NumericError):
    """A root bracket does not contain a sign change."""


class ConfigError(FeatherwingError):
    """Configuration file is unreadable or fails validation."""
