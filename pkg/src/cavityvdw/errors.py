"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the physical or mathematical domain of an operation."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Carries the achieved absolute-error estimate and the target so callers
    can decide whether the partial result is usable.
    """

    def __init__(self, message, achieved=None, target=None, value=None):
        super().__init__(message)
        self.achieved = achieved
        self.target = target
        self.value = value


class FitError(RuntimeError):
    """Least-squares fit failed to converge or produced unphysical parameters."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ConfigError(ValueError):
    """Configuration file is malformed or violates a constraint."""
