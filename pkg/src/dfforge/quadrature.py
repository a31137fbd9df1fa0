"""Quadrature for Abel-type integrals with an algebraic endpoint weight.

* :func:`abel_lower` computes ``int_0^x F(psi) (x - psi)**(-alpha) dpsi``.
* :func:`abel_upper` computes ``int_x^inf F(Phi) (Phi - x)**(-alpha) dPhi``.

Both use Gauss-Jacobi panels whose weight absorbs the endpoint singularity, so
the singular endpoint is never sampled. Refinement bisects every panel until
two successive levels agree to the requested relative tolerance.

:func:`tanh_sinh` supplies double-exponential rules (with accurately computed
distances to both endpoints) for the verification integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable

import numpy as np
from scipy import special as sc

from dfforge.coefficients import CoefficientFunction, TabulatedCoefficient
from dfforge.config import get_config
from dfforge.errors import DivergenceError, QuadratureError

__all__ = [
    "AbelWeight",
    "abel_lower",
    "abel_upper",
    "gauss_jacobi",
    "tanh_sinh",
    "TanhSinhRule",
]

Evaluable = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class AbelWeight:
    """Exponent and orientation of the kernel ``|t - x|**(-alpha)``."""

    alpha: float
    upper: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.alpha < 1:
            raise ValueError(f"Abel exponent must lie in [0, 1): alpha={self.alpha}")


@lru_cache(maxsize=256)
def gauss_jacobi(n: int, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for ``int_{-1}^{1} (1-t)**a (1+t)**b g(t) dt``."""
    if a == 0 and b == 0:
        t, w = np.polynomial.legendre.leggauss(n)
    else:
        t, w = sc.roots_jacobi(n, a, b)
    t.setflags(write=False)
    w.setflags(write=False)
    return t, w


def _unit_rule(level: int, order: int, left: float, right: float
               ) -> tuple[np.ndarray, np.ndarray]:
    """Composite rule for ``int_0^1 s**left (1-s)**right g(s) ds`` on ``2**level`` panels.

    Returns ``(s, W)`` so that the integral is ``sum(W * g(s))``; the singular
    factors are folded into ``W``.
    """
    npanel = 2**level
    h = 1.0 / npanel
    if npanel == 1:
        t, w = gauss_jacobi(order, right, left)
        s = 0.5 * (1 + t)
        return s, w * 0.5 ** (1 + left + right)

    nodes, weights = [], []
    t, w = gauss_jacobi(order, 0.0, left)
    s = 0.5 * h * (1 + t)
    nodes.append(s)
    weights.append(w * (0.5 * h) ** (1 + left) * (1 - s) ** right)

    t, w = gauss_jacobi(order, 0.0, 0.0)
    lo = np.arange(1, npanel - 1) * h
    s = (lo[:, None] + 0.5 * h * (1 + t)[None, :]).ravel()
    nodes.append(s)
    weights.append(np.tile(w * 0.5 * h, npanel - 2) * s**left * (1 - s) ** right)

    t, w = gauss_jacobi(order, right, 0.0)
    comp = 0.5 * h * (1 - t)
    s = 1 - comp
    nodes.append(s)
    weights.append(w * (0.5 * h) ** (1 + right) * s**left)
    return np.concatenate(nodes), np.concatenate(weights)


def _refine(integrate_level: Callable[[int, np.ndarray], tuple[np.ndarray, np.ndarray]],
            size: int, tol: float, max_depth: int, what: str) -> np.ndarray:
    """Drive level-by-level refinement until successive levels agree.

    ``integrate_level(level, idx)`` returns ``(value, scale)`` for the entries
    ``idx``; ``scale`` is an integral of the absolute integrand used as an
    absolute floor for the convergence test.
    """
    result = np.empty(size)
    active = np.arange(size)
    prev, _ = integrate_level(0, active)
    for level in range(1, max_depth + 1):
        cur, scale = integrate_level(level, active)
        err = np.abs(cur - prev)
        ok = err <= tol * np.maximum(np.abs(cur), 1e-3 * scale) + 1e-300
        result[active[ok]] = cur[ok]
        if ok.all():
            return result
        active, prev = active[~ok], cur[~ok]
    i = int(np.argmax(err[~ok]))
    raise QuadratureError(f"{what} did not converge after {max_depth} refinements",
                          estimate=float(cur[~ok][i]), error=float(err[~ok][i]))


def _as_array(x: Any) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x, dtype=float)
    return arr.ravel(), arr.ndim == 0


def _lower_smooth(S: Evaluable, x: np.ndarray, alpha: float, beta: float,
                  tol: float, max_depth: int, order: int) -> np.ndarray:
    # int_0^x psi^beta S(psi) (x-psi)^-alpha dpsi = x^(1+beta-alpha) int_0^1 s^beta (1-s)^-alpha S(xs) ds
    out = np.zeros_like(x)
    pos = x > 0
    if not pos.any():
        return out
    xp = x[pos]

    def level(lev: int, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s, W = _unit_rule(lev, order, beta, -alpha)
        vals = S(xp[idx, None] * s[None, :])
        return vals @ W, np.abs(vals) @ np.abs(W)

    out[pos] = _refine(level, xp.size, tol, max_depth, "abel_lower") * xp ** (1 + beta - alpha)
    return out


def abel_lower(F: CoefficientFunction | TabulatedCoefficient | Evaluable, x: Any,
               alpha: float, *, beta: float = 0.0, tol: float | None = None,
               max_depth: int | None = None, order: int | None = None) -> Any:
    """``int_0^x psi**beta F(psi) (x - psi)**(-alpha) dpsi`` for ``x >= 0``.

    ``F`` should be smooth on ``[0, x]``; a known algebraic behaviour at the
    origin is passed as ``beta``. Coefficient functions are split by
    fractional exponent automatically, so ``beta`` is ignored for them.
    """
    AbelWeight(alpha)
    cfg = get_config()
    tol = cfg.tol if tol is None else tol
    max_depth = cfg.max_depth if max_depth is None else max_depth
    order = cfg.order if order is None else order
    xs, scalar = _as_array(x)
    if np.any(xs < 0):
        raise ValueError("abel_lower requires x >= 0")

    if isinstance(F, CoefficientFunction):
        out = np.zeros_like(xs)
        for b, S in F.split_powers():
            if b <= -1:
                raise DivergenceError(f"x^{b} is not integrable at the origin")
            out += _lower_smooth(S, xs, alpha, b, tol, max_depth, order)
    else:
        if beta <= -1:
            raise DivergenceError(f"x^{beta} is not integrable at the origin")
        out = _lower_smooth(F, xs, alpha, beta, tol, max_depth, order)
    return float(out[0]) if scalar else out.reshape(np.shape(x))


def _tail_remainder(F: CoefficientFunction, x: np.ndarray, T: float, alpha: float) -> np.ndarray:
    """Bound on ``int_{x+T}^inf |F(Phi)| (Phi-x)**(-alpha) dPhi``."""
    out = np.zeros_like(x)
    for a in F.atoms:
        s = a.p + 1
        out += abs(a.c) * sc.gamma(s) * sc.gammaincc(s, a.k * (x + T)) / a.k**s
    return out * T ** (-alpha)


def abel_upper(F: CoefficientFunction | Evaluable, x: Any, alpha: float, *,
               tol: float | None = None, max_depth: int | None = None,
               order: int | None = None) -> Any:
    """``int_x^inf F(Phi) (Phi - x)**(-alpha) dPhi`` for ``x >= 0``.

    With ``Phi = x + t**2`` the kernel becomes ``2 t**(1 - 2 alpha)``. The range
    in ``t`` is truncated where the exponential bound on the remainder drops
    below the tolerance. A non-decaying ``F`` raises :class:`DivergenceError`.
    """
    AbelWeight(alpha, upper=True)
    cfg = get_config()
    tol = cfg.tol if tol is None else tol
    max_depth = cfg.max_depth if max_depth is None else max_depth
    order = cfg.order if order is None else order
    xs, scalar = _as_array(x)
    if np.any(xs < 0):
        raise ValueError("abel_upper requires x >= 0")

    if isinstance(F, CoefficientFunction):
        if F.is_zero:
            out = np.zeros_like(xs)
            return float(out[0]) if scalar else out.reshape(np.shape(x))
        if not F.decays:
            raise DivergenceError("integrand does not decay: every atom needs exp(-k x), k > 0")
        T = 40.0 / F.min_decay_rate
    else:
        T = _probe_decay(F, xs, alpha)

    def integrate(T: float) -> np.ndarray:
        tmax = math.sqrt(T)

        def level(lev: int, idx: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            # variable t/tmax in [0, 1]; weight (t/tmax)^(1-2 alpha)
            s, W = _unit_rule(lev, order, 1 - 2 * alpha, 0.0)
            t = tmax * s
            vals = F(xs[idx, None] + (t * t)[None, :])
            W = 2 * W * tmax ** (2 - 2 * alpha)
            return vals @ W, np.abs(vals) @ np.abs(W)

        return _refine(level, xs.size, tol, max_depth, "abel_upper")

    out = integrate(T)
    if isinstance(F, CoefficientFunction):
        for _ in range(20):
            rem = _tail_remainder(F, xs, T, alpha)
            if np.all(rem <= 0.1 * tol * np.abs(out) + 1e-300):
                break
            T *= 2
            out = integrate(T)
        else:
            raise QuadratureError("abel_upper truncation did not converge")
    return float(out[0]) if scalar else out.reshape(np.shape(x))


def _probe_decay(F: Evaluable, x: np.ndarray, alpha: float, limit: float = 1e6) -> float:
    """Find ``T`` beyond which ``F(x + t) t**(1-alpha)`` is negligible."""
    ref = np.max(np.abs(F(x[:, None] + np.linspace(0.0, 1.0, 33)[None, :])))
    if not np.isfinite(ref):
        raise DivergenceError("integrand is not finite near the lower limit")
    ref = max(ref, 1e-300)
    T = 1.0
    while T <= limit:
        tail = np.abs(F(x[:, None] + T * np.array([1.0, 1.5, 2.0])[None, :]))
        if np.max(tail) * T ** (1 - alpha) * 2 <= 1e-16 * ref:
            return 2 * T
        T *= 2
    raise DivergenceError(f"integrand does not decay within Phi - x <= {limit:g}")


# {{{ tanh-sinh


@dataclass(frozen=True)
class TanhSinhRule:
    """Nodes on ``(-1, 1)`` with both endpoint distances computed without cancellation."""

    one_plus: np.ndarray
    one_minus: np.ndarray
    weights: np.ndarray

    def on(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """``(points, distance to a, distance to b, weights)`` on ``[a, b]``."""
        half = 0.5 * (b - a)
        dl = half * self.one_plus
        dr = half * self.one_minus
        pts = np.where(dl <= dr, a + dl, b - dr)
        return pts, dl, dr, self.weights * half


@lru_cache(maxsize=16)
def tanh_sinh(level: int, t_max: float = 4.5) -> TanhSinhRule:
    """Tanh-sinh rule with step ``2**-level`` truncated at ``|t| <= t_max``."""
    h = 2.0**-level
    k = np.arange(-int(math.ceil(t_max / h)), int(math.ceil(t_max / h)) + 1)
    t = k * h
    u = 0.5 * math.pi * np.sinh(t)
    one_minus = 2.0 / (np.exp(2 * u) + 1.0)
    one_plus = 2.0 / (np.exp(-2 * u) + 1.0)
    w = h * 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    return TanhSinhRule(one_plus, one_minus, w)


# }}}
