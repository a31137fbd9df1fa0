"""Exception hierarchy for :mod:`dfforge`."""

from __future__ import annotations


class DFForgeError(Exception):
    """Base class for every error raised by the package."""


class ModelSpecError(DFForgeError, ValueError):
    """A model specification document violates the schema."""

    def __init__(self, field: str, message: str) -> None:
        super().__init__(f"{field}: {message}")
        self.field = field


class AdmissibilityError(ModelSpecError):
    """A density term has ``n * beta <= -1``."""


class ConfigurationError(ModelSpecError):
    """A required model parameter (e.g. ``R_a``) is missing or inconsistent."""


class DomainError(DFForgeError, ValueError):
    """An expression was evaluated outside its domain."""


class QuadratureError(DFForgeError, ArithmeticError):
    """Quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, estimate: float = float("nan"),
                 error: float = float("nan")) -> None:
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")
        self.estimate = estimate
        self.error = error


class DivergenceError(QuadratureError):
    """An improper integral does not converge (integrand does not decay)."""

    def __init__(self, message: str) -> None:
        super().__init__(message)


class DerivativeAccuracyError(DFForgeError, ArithmeticError):
    """A tabulated coefficient cannot be differentiated to the requested accuracy."""


class SynthesisError(DFForgeError, ValueError):
    """A density expansion violates the preconditions of a DF formula."""


class UnsupportedParameterError(DFForgeError, ValueError):
    """Parameters fall into a case excluded by the closed-form expressions."""


class UndefinedMomentError(DFForgeError, ValueError):
    """Velocity moments requested where the density vanishes."""
