"""Numerical settings shared by the quadrature routines.

Settings live in a :class:`contextvars.ContextVar` so that temporary overrides
made with :func:`configure` are local to the current thread or task.
"""

from __future__ import annotations

import contextlib
import contextvars
import os
from dataclasses import dataclass, replace
from typing import Iterator

ENV_QUAD_TOL = "DFFORGE_QUAD_TOL"


@dataclass(frozen=True)
class QuadratureConfig:
    tol: float = 1e-10
    """Relative tolerance of the Abel-type integrals."""
    max_depth: int = 12
    """Maximum number of panel bisections."""
    order: int = 24
    """Gauss-Jacobi nodes per panel."""
    max_derivative: int = 16
    """Largest derivative order handed out by :func:`dfforge.coefficients.derivative`."""
    G: float = 1.0
    """Gravitational constant used by the built-in models."""

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ValueError(f"tol must be positive: {self.tol}")
        if self.max_depth < 0:
            raise ValueError(f"max_depth must be non-negative: {self.max_depth}")
        if self.order < 2:
            raise ValueError(f"order must be at least 2: {self.order}")


def _from_environment() -> QuadratureConfig:
    value = os.environ.get(ENV_QUAD_TOL)
    if value is None:
        return QuadratureConfig()
    return QuadratureConfig(tol=float(value))


_CONFIG: contextvars.ContextVar[QuadratureConfig] = contextvars.ContextVar(
    "dfforge_config", default=_from_environment())


def get_config() -> QuadratureConfig:
    return _CONFIG.get()


@contextlib.contextmanager
def configure(**changes: float | int) -> Iterator[QuadratureConfig]:
    """Temporarily override fields of the active :class:`QuadratureConfig`.

    >>> with configure(tol=1e-8) as cfg:
    ...     cfg.tol
    1e-08
    """
    token = _CONFIG.set(replace(_CONFIG.get(), **changes))
    try:
        yield _CONFIG.get()
    finally:
        _CONFIG.reset(token)
