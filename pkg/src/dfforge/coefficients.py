"""Coefficient functions of the potential.

A :class:`CoefficientFunction` is a finite sum of atoms ``c * x**p * exp(-k*x)``.
The family is closed under differentiation, so every derivative needed by the
inversion formulas is exact. Antiderivatives are closed-form as well (powers
and incomplete gamma functions).

Functions outside the family can be wrapped in a :class:`TabulatedCoefficient`,
a Chebyshev interpolant on ``[0, x_max]`` whose derivatives lose accuracy with
every order (roughly a factor ``N**2`` per order for ``N`` coefficients).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Sequence

import numpy as np
from numpy.polynomial import Chebyshev
from scipy import special as sc

from dfforge.config import get_config
from dfforge.errors import DerivativeAccuracyError, DivergenceError, DomainError

__all__ = [
    "Atom",
    "CoefficientFunction",
    "TabulatedCoefficient",
    "derivative",
    "power",
    "exponential",
]


@dataclass(frozen=True)
class Atom:
    """``c * x**p * exp(-k*x)``."""

    c: float
    p: float
    k: float = 0.0

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError(f"decay rate must be non-negative: k={self.k}")

    def __call__(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            out = self.c * np.power(x, self.p)
            if self.k:
                out = out * np.exp(-self.k * x)
        return out[()] if out.ndim == 0 else out

    def diff(self) -> tuple[Atom, ...]:
        out = []
        if self.p != 0:
            out.append(Atom(self.c * self.p, self.p - 1, self.k))
        if self.k != 0:
            out.append(Atom(-self.c * self.k, self.p, self.k))
        return tuple(out)


def _normalize(atoms: Iterable[Atom]) -> tuple[Atom, ...]:
    merged: dict[tuple[float, float], float] = {}
    for a in atoms:
        key = (float(a.p), float(a.k))
        merged[key] = merged.get(key, 0.0) + float(a.c)
    return tuple(Atom(c, p, k) for (p, k), c in sorted(merged.items(), key=lambda kv: (kv[0][1], kv[0][0]))
                 if c != 0.0)


@dataclass(frozen=True)
class CoefficientFunction:
    """Finite sum of :class:`Atom`; immutable and normalized on construction."""

    atoms: tuple[Atom, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "atoms", _normalize(self.atoms))

    @classmethod
    def from_triples(cls, triples: Iterable[Sequence[float]]) -> CoefficientFunction:
        return cls(tuple(Atom(*t) for t in triples))

    def __call__(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a in self.atoms:
            out = out + a(x)
        return out[()] if out.ndim == 0 else out

    def __add__(self, other: CoefficientFunction) -> CoefficientFunction:
        return CoefficientFunction(self.atoms + other.atoms)

    def __mul__(self, scale: float) -> CoefficientFunction:
        return CoefficientFunction(tuple(Atom(scale * a.c, a.p, a.k) for a in self.atoms))

    __rmul__ = __mul__

    def __neg__(self) -> CoefficientFunction:
        return self * -1.0

    @property
    def is_zero(self) -> bool:
        return not self.atoms

    @property
    def decays(self) -> bool:
        """True when every atom carries ``exp(-k x)`` with ``k > 0``."""
        return all(a.k > 0 for a in self.atoms)

    @property
    def min_decay_rate(self) -> float:
        return min((a.k for a in self.atoms), default=0.0)

    def diff(self, order: int = 1) -> CoefficientFunction:
        out = self
        for _ in range(order):
            out = CoefficientFunction(tuple(d for a in out.atoms for d in a.diff()))
        return out

    def value_at_zero(self) -> float:
        """Exact value at ``x = 0``; raises if an atom is singular there."""
        total = 0.0
        for a in self.atoms:
            if a.p < 0:
                raise DomainError(f"coefficient is singular at 0 (atom x^{a.p})")
            if a.p == 0:
                total += a.c
        return total

    def min_power(self) -> float:
        return min((a.p for a in self.atoms), default=math.inf)

    def split_powers(self) -> list[tuple[float, CoefficientFunction]]:
        """Write ``F(x) = sum_g x**beta_g * S_g(x)`` with each ``S_g`` smooth at 0.

        Atoms are grouped by the fractional part of their exponent; ``beta_g`` is
        the smallest exponent of a group, so ``S_g`` has non-negative integer
        powers only.
        """
        groups: dict[float, list[Atom]] = {}
        for a in self.atoms:
            frac = round(a.p - math.floor(a.p), 12) % 1.0
            groups.setdefault(frac, []).append(a)
        out = []
        for _, atoms in sorted(groups.items()):
            beta = min(a.p for a in atoms)
            smooth = CoefficientFunction(tuple(Atom(a.c, round(a.p - beta), a.k) for a in atoms))
            out.append((beta, smooth))
        return out

    def integral_from_zero(self, x: Any) -> Any:
        """``int_0^x F(t) dt`` in closed form."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a in self.atoms:
            s = a.p + 1.0
            if s <= 0:
                raise DivergenceError(f"integral of x^{a.p} from 0 diverges")
            if a.k == 0:
                out = out + a.c * np.power(x, s) / s
            else:
                out = out + a.c * sc.gamma(s) * sc.gammainc(s, a.k * x) / a.k**s
        return out[()] if out.ndim == 0 else out

    def integral_to_infinity(self, x: Any) -> Any:
        """``int_x^inf F(t) dt`` in closed form; every atom must decay."""
        if not self.decays:
            raise DivergenceError("tail integral of a non-decaying coefficient")
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a in self.atoms:
            s = a.p + 1.0
            if s <= 0:
                raise DomainError(f"tail integral of x^{a.p} is not supported")
            out = out + a.c * sc.gamma(s) * sc.gammaincc(s, a.k * x) / a.k**s
        return out[()] if out.ndim == 0 else out

    def to_triples(self) -> list[dict[str, float]]:
        return [{"c": a.c, "p": a.p, "k": a.k} for a in self.atoms]

    def __str__(self) -> str:
        if not self.atoms:
            return "0"
        parts = []
        for a in self.atoms:
            s = f"{a.c:g}"
            if a.p:
                s += f"*x^{a.p:g}"
            if a.k:
                s += f"*exp(-{a.k:g}x)"
            parts.append(s)
        return " + ".join(parts)


def power(p: float, c: float = 1.0) -> CoefficientFunction:
    """``c * x**p``."""
    return CoefficientFunction((Atom(c, p, 0.0),))


def exponential(k: float, c: float = 1.0, p: float = 0.0) -> CoefficientFunction:
    """``c * x**p * exp(-k x)``."""
    return CoefficientFunction((Atom(c, p, k),))


# {{{ tabulated fallback

@dataclass(frozen=True)
class TabulatedCoefficient:
    """Chebyshev interpolant of an arbitrary smooth function on ``[0, x_max]``.

    ``error`` is an estimate of the sup-norm error of this interpolant. Each
    differentiation multiplies it by ``(N**2) * 2 / x_max`` (Markov's inequality),
    which is the documented accuracy loss per derivative order.
    """

    series: Chebyshev
    x_max: float
    error: float
    order: int = 0
    tol: float = field(default=1e-6, compare=False)

    @classmethod
    def from_function(cls, func: Callable[[np.ndarray], np.ndarray], x_max: float,
                      max_degree: int = 256, tol: float = 1e-6) -> TabulatedCoefficient:
        series = None
        for deg in (16, 32, 64, 128, max_degree):
            series = Chebyshev.interpolate(func, deg, domain=[0.0, x_max])
            tail = float(np.max(np.abs(series.coef[-4:])))
            scale = float(np.max(np.abs(series.coef))) or 1.0
            if tail <= 1e-15 * scale:
                break
        assert series is not None
        return cls(series, float(x_max), error=max(tail, 4e-16 * scale), tol=tol)

    def __call__(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        if np.any((x < 0) | (x > self.x_max * (1 + 1e-12))):
            raise DomainError(f"tabulated coefficient evaluated outside [0, {self.x_max}]")
        out = self.series(x)
        return out[()] if np.ndim(out) == 0 else out

    def diff(self, order: int = 1) -> TabulatedCoefficient:
        n = len(self.series.coef)
        err = self.error * (2.0 * n * n / self.x_max) ** order
        d = self.series.deriv(order) if order else self.series
        scale = float(np.max(np.abs(d(np.linspace(0, self.x_max, 257))))) or 1.0
        if err > self.tol * scale:
            raise DerivativeAccuracyError(
                f"derivative of order {self.order + order} has estimated error "
                f"{err:.3g} > {self.tol:g} x scale {scale:.3g}")
        return TabulatedCoefficient(d, self.x_max, err, self.order + order, self.tol)

    def value_at_zero(self) -> float:
        return float(self.series(0.0))

    @property
    def decays(self) -> bool:
        return False

    @property
    def is_zero(self) -> bool:
        return not np.any(self.series.coef)

    def min_power(self) -> float:
        return 0.0

    def split_powers(self) -> list[tuple[float, TabulatedCoefficient]]:
        return [(0.0, self)]

    def integral_from_zero(self, x: Any) -> Any:
        prim = self.series.integ(lbnd=0.0)
        out = prim(np.asarray(x, dtype=float))
        return out[()] if np.ndim(out) == 0 else out

    def __mul__(self, scale: float) -> TabulatedCoefficient:
        return TabulatedCoefficient(self.series * scale, self.x_max, abs(scale) * self.error,
                                    self.order, self.tol)

    __rmul__ = __mul__


# }}}


def derivative(coeff: CoefficientFunction | TabulatedCoefficient,
               order: int) -> CoefficientFunction | TabulatedCoefficient:
    """Exact derivative of a coefficient function (estimated for tabulated ones)."""
    if order < 0:
        raise ValueError(f"derivative order must be non-negative: {order}")
    max_order = get_config().max_derivative
    if order > max_order:
        raise ValueError(f"derivative order {order} exceeds configured maximum {max_order}")
    return coeff.diff(order)
