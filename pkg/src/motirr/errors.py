"""Exception types shared across the package."""


class NoEvanescentFieldError(ValueError):
    """Raised when the incidence angle does not give total internal reflection."""


class NoSolutionError(ValueError):
    """Raised when a requested target lies outside the attainable range."""


class ConvergenceError(ArithmeticError):
    """Raised when a quadrature or root search fails to reach its tolerance."""


class ConfigError(ValueError):
    """Invalid run configuration. ``key`` names the offending entry."""

    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key
