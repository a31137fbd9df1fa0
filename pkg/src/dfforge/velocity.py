"""Velocity-space integrals of two-integral DFs at a configuration point.

At potential argument ``psi`` (bounded) or ``Phi`` (unbounded) and radius ``R``,

    int g f d^3v = 4 pi int dE int_0^{v_max(E)} g(E, v) f(E, R v) dv

where ``v = v_phi >= 0`` and ``v_max**2 / 2`` is the kinetic energy available
(``psi - eps`` or ``E - Phi``). The ``(v_R, v_z)`` directions have been
integrated out analytically, which leaves the weights

* ``density``: 1
* ``vR2``: ``<v_R**2>`` share, ``K - v**2/2`` with ``K = v_max**2/2``
* ``vphi2``: ``v**2``
* ``vphi``: ``v`` (odd DFs; twice the positive half of the antisymmetric integrand)

For a component ``|L_z|**s h(Q)`` (with ``Q = eps`` or ``E`` when there is no
scale radius) the ``v`` integral at fixed ``Q`` is elementary. With
``lam = R**2/R_a**2`` and ``V**2 = 2 |pot - Q| / (1 + lam)``,

    int f d^3v = 4 pi R**s int h(Q) V**(s+1)/(s+1) dQ

and the other weights give ``V**(s+3)/(s+3)``, ``V**(s+2)/(s+2)`` and
``(1+lam) V**(s+3)/((s+1)(s+3))``. The remaining integral is done with a
tanh-sinh rule after ``Q = psi y**m``, where ``m`` absorbs the component's
``edge_exponent``. In an unbounded potential that dips below zero the
``E > 0`` cutoff cuts across this reduction, and the two-dimensional form is
integrated instead, split at the ``Q = 0`` cutoff with ``Q`` rebuilt from
endpoint distances to avoid cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from dfforge.config import get_config
from dfforge.errors import DomainError, QuadratureError
from dfforge.quadrature import tanh_sinh
from dfforge.synthesis import ArgumentKind, DFComponent, DistributionFunction, Parity

__all__ = ["Estimate", "Moment", "velocity_moment"]

Moment = Literal["density", "vR2", "vphi2", "vphi"]

_T_MAX = 4.0
_TAIL = 46.0  # exp(-46) ~ 1e-20


@dataclass(frozen=True)
class Estimate:
    """Quadrature result with the difference between the last two levels."""

    value: float
    error: float
    level: int = 0

    def __float__(self) -> float:
        return self.value


def _weight(moment: Moment, K: np.ndarray, v: np.ndarray, one_minus_sq: np.ndarray | None) -> np.ndarray:
    if moment == "density":
        return np.ones_like(v)
    if moment == "vphi2":
        return v * v
    if moment == "vphi":
        return v
    if moment == "vR2":
        if one_minus_sq is not None:
            return K * one_minus_sq
        return K - 0.5 * v * v
    raise ValueError(f"unknown moment {moment!r}")


def _inner(comp: DFComponent, moment: Moment, E: np.ndarray, K: np.ndarray, vcut: np.ndarray,
           R: float, qfun, full: bool, rule) -> np.ndarray:
    """``int_0^vcut g f_c dv`` for each outer node; ``qfun(u, one_minus_u)`` builds the argument."""
    _, u, one_minus_u, w = rule.on(0.0, 1.0)
    s = comp.lz_power
    if s < 0:
        # v = vcut u**c with c = 1/(1+s) absorbs v**s: v**s dv = vcut**(1+s) c du
        c = 1.0 / (1.0 + s)
        U = u[None, :] ** c
        with np.errstate(divide="ignore"):
            OMU = -np.expm1(c * np.log1p(-one_minus_u))[None, :]
        measure = vcut ** (1 + s) * c * R**s
    else:
        U, OMU = u[None, :], one_minus_u[None, :]
        measure = vcut
    v = vcut[:, None] * U
    oms = OMU * (1 + U) if full else None
    g = _weight(moment, K[:, None], v, oms)
    lz = comp.lz_part(R * v) if s >= 0 else 1.0
    if comp.argument.uses_q:
        arg = qfun(U, OMU)
        e = comp.energy_part(arg, np.broadcast_to(E[:, None], arg.shape))
    else:
        e = comp.energy_part(E)[:, None]
    return measure * ((g * lz * e) @ w)


def _reduced_weight(moment: Moment, s: float, V: np.ndarray, lam: float) -> np.ndarray:
    if moment == "density":
        return V ** (s + 1) / (s + 1)
    if moment == "vphi2":
        return V ** (s + 3) / (s + 3)
    if moment == "vphi":
        return V ** (s + 2) / (s + 2)
    if moment == "vR2":
        return (1 + lam) * V ** (s + 3) / ((s + 1) * (s + 3))
    raise ValueError(f"unknown moment {moment!r}")


def _component_reduced(comp: DFComponent, moment: Moment, pot: float, R: float,
                       level: int, span: float | None) -> float:
    """One-dimensional form in ``Q``; see the module docstring."""
    s = comp.lz_power
    lam = (R / comp.R_a) ** 2 if comp.argument.uses_q else 0.0
    rule = tanh_sinh(level, _T_MAX)
    _, y, one_minus_y, w = rule.on(0.0, 1.0)
    if comp.argument.bounded:
        if pot <= 0:
            return 0.0
        e = comp.edge_exponent
        m = 1.0 / (1.0 + e) if e < 0 else 1.0
        with np.errstate(under="ignore", divide="ignore"):
            Q = pot * y**m
            D = -pot * np.expm1(m * np.log1p(-one_minus_y))
        if e < 0:
            # dQ = pot**(1+e) m Q**(-e) dy; h Q**(-e) tends to a constant, so
            # underflowing Q is clipped rather than let h overflow
            Qc = np.maximum(Q, pot * 1e-250)
            h = comp.energy_part(Qc) * (Qc / pot) ** (-e) * pot * m
        else:
            h = comp.energy_part(Q) * pot
    else:
        assert span is not None
        Q = pot + span * y
        D = span * y
        h = comp.energy_part(Q) * span
    V = np.sqrt(2 * D / (1 + lam))
    Rs = R**s if s else 1.0
    return 4 * math.pi * Rs * float((h * _reduced_weight(moment, s, V, lam)) @ w)


def _component_integral(comp: DFComponent, moment: Moment, pot: float, R: float,
                        level: int, span: float | None) -> float:
    if comp.argument.bounded or pot >= 0:
        return _component_reduced(comp, moment, pot, R, level, span)
    rule = tanh_sinh(level, _T_MAX)
    total = 0.0
    kind = comp.argument
    if kind.bounded:
        psi = pot
        if psi <= 0:
            return 0.0
        pieces = [(0.0, psi, False)]
        if kind is ArgumentKind.Q_BOUNDED and R > 0:
            lam = (R / comp.R_a) ** 2
            eps_star = psi * lam / (1 + lam)
            pieces = [(0.0, eps_star, True), (eps_star, psi, False)]
        for a, b, cut in pieces:
            if b <= a:
                continue
            eps, dl, dr, w = rule.on(a, b)
            if cut:
                # Q = eps - R^2 v^2 / (2 R_a^2) vanishes at v = vQ < vmax
                K = psi - eps
                vcut = comp.R_a * np.sqrt(2 * eps) / R
                qfun = lambda U, OMU, eps=eps: eps[:, None] * OMU * (1 + U)
            else:
                K = (psi - b) + dr
                vcut = np.sqrt(2 * K)
                if kind is ArgumentKind.Q_BOUNDED:
                    lam = (R / comp.R_a) ** 2
                    qfun = lambda U, OMU, eps=eps, dl=dl, lam=lam: (
                        eps[:, None] * OMU * (1 + U) + U * U * (dl[:, None] * (1 + lam)))
                else:
                    qfun = None
            full = not cut
            total += float(_inner(comp, moment, eps, K, vcut, R, qfun, full, rule) @ w)
        return 4 * math.pi * total

    Phi = pot
    E0 = max(Phi, 0.0)
    assert span is not None
    E, dl, dr, w = rule.on(E0, E0 + span)
    K = (E0 - Phi) + dl
    vcut = np.sqrt(2 * K)
    qfun = None
    if kind is ArgumentKind.Q_UNBOUNDED:
        c = R * R / (2 * comp.R_a**2)
        qfun = lambda U, OMU: E[:, None] + c * (vcut[:, None] * U) ** 2
    total = float(_inner(comp, moment, E, K, vcut, R, qfun, True, rule) @ w)
    return 4 * math.pi * total


def velocity_moment(df: DistributionFunction, pot: float, R: float, moment: Moment = "density", *,
                    tol: float | None = None, min_level: int = 4, max_level: int = 9) -> Estimate:
    """``int g f d^3v`` at ``(pot, R)``; ``pot`` is ``psi`` or ``Phi`` per the DF's convention.

    Levels of the tanh-sinh rule are increased until two successive results
    agree to ``tol`` (relative, default ``max(100 * quad tol, 1e-12)``).
    """
    if R < 0:
        raise DomainError(f"R must be non-negative, got {R}")
    if R == 0 and any(c.lz_power < 0 for c in df.components):
        raise DomainError("components with negative L_z powers are singular on the axis")
    if moment == "vphi" and df.parity is not Parity.ODD:
        raise ValueError("the mean-rotation moment needs an odd DF")
    if moment != "vphi" and df.parity is not Parity.EVEN:
        raise ValueError(f"moment {moment!r} needs an even DF")
    tol = max(100 * get_config().tol, 1e-12) if tol is None else tol
    span = None
    if not df.convention.bounded:
        rate = df.decay_rate
        if not rate:
            raise QuadratureError("unbounded DF without an exponential decay rate")
        span = _TAIL / rate

    def at(level: int) -> tuple[float, float]:
        vals = [_component_integral(c, moment, pot, R, level, span) for c in df.components]
        return math.fsum(vals), math.fsum(abs(x) for x in vals)

    prev, _ = at(min_level)
    for level in range(min_level + 1, max_level + 1):
        cur, scale = at(level)
        err = abs(cur - prev)
        if err <= tol * max(abs(cur), 1e-6 * scale) or scale == 0:
            return Estimate(cur, err, level)
        prev = cur
    raise QuadratureError(f"velocity integral did not converge by level {max_level}",
                          estimate=cur, error=err)
