"""Two-integral distribution functions from potential-radius density expansions.

Each density term ``rho_n(psi) R**(2 n beta)`` pairs with a DF component
``|L_z|**(2 n beta) h_n(eps)``; a scaled term
``rhohat_n(psi) R**(2 n beta) / (1 + R**2/R_a**2)**(n beta + 1/2)`` pairs with
``|L_z|**(2 n beta) g_n(Q)``. With ``nb = n beta``, ``a = floor(nb + 3/2)`` and
``alpha = nb + 3/2 - a`` in ``[0, 1)``, the energy part is

    h(eps) = K [ int_0^eps rho^(a+1)(psi) (eps - psi)**-alpha dpsi
                 + eps**-alpha rho^(a)(0) ]

    K = 1 / (2**(3/2) pi 2**nb Gamma(nb + 1/2) Gamma(1 - alpha))

for bounded potentials (requires ``rho^(j)(0) = 0`` for ``j < a``), and

    h(E) = (-1)**(a+1) K int_E^inf rho^(a+1)(Phi) (Phi - E)**-alpha dPhi

for unbounded ones (requires every derivative to decay). For ``beta = 1`` this
is ``a = n + 1``, ``alpha = 1/2`` and ``K = 1 / ((2 pi)**(3/2) 2**n Gamma(n + 1/2))``.

The outer derivative of the Abel inversion is never taken numerically: the
integrated-by-parts form above only needs exact derivatives of the
coefficient functions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, ClassVar, Iterable, Mapping

import numpy as np

from dfforge.coefficients import CoefficientFunction, TabulatedCoefficient, derivative
from dfforge.errors import DivergenceError, SynthesisError, UnsupportedParameterError
from dfforge.model import (
    BOUNDED,
    UNBOUNDED,
    DensityExpansion,
    DensityTerm,
    Family,
    PotentialConvention,
)
from dfforge.quadrature import abel_lower, abel_upper
from dfforge.special import H, double_factorial, gamma, rgamma

__all__ = [
    "ArgumentKind",
    "Parity",
    "Variant",
    "DFComponent",
    "DistributionFunction",
    "EvenDF",
    "OddDF",
    "AbelEnergyFunction",
    "SynthesisRequest",
    "abel_order",
    "synthesize",
    "synthesize_even_bounded",
    "synthesize_even_q",
    "synthesize_even_general",
    "synthesize_even_unbounded",
    "dejonghe_energy_part",
    "dejonghe_powerlaw_df",
    "dejonghe_h_df",
    "exp_pair",
    "binney_odd_components",
    "binney_odd_df",
]


class ArgumentKind(str, enum.Enum):
    EPSILON = "epsilon"
    """Relative energy ``eps`` (bounded potentials)."""
    ENERGY = "energy"
    """Energy ``E`` (unbounded potentials)."""
    Q_BOUNDED = "q_bounded"
    """``Q = eps - L_z**2 / (2 R_a**2)``."""
    Q_UNBOUNDED = "q_unbounded"
    """``Q = E + L_z**2 / (2 R_a**2)``."""

    @property
    def bounded(self) -> bool:
        return self in (ArgumentKind.EPSILON, ArgumentKind.Q_BOUNDED)

    @property
    def uses_q(self) -> bool:
        return self in (ArgumentKind.Q_BOUNDED, ArgumentKind.Q_UNBOUNDED)


class Parity(str, enum.Enum):
    EVEN = "even"
    ODD = "odd"


class Variant(str, enum.Enum):
    EPSILON = "epsilon"
    Q = "q"
    GENERAL = "general"
    UNBOUNDED_EPSILON = "unbounded-epsilon"
    UNBOUNDED_Q = "unbounded-q"
    UNBOUNDED_GENERAL = "unbounded-general"

    @property
    def unbounded(self) -> bool:
        return self.value.startswith("unbounded")


# {{{ DF containers


@dataclass(frozen=True)
class DFComponent:
    """``sgn(L_z)**odd * |L_z|**lz_power * energy_fn(argument)``.

    ``energy_fn`` is vectorized and only ever called with positive arguments;
    the component vanishes when the argument (or the energy itself) is ``<= 0``.
    ``edge_exponent`` is a lower bound on the power law of ``energy_fn`` as its
    argument goes to zero; negative values mark an integrable singularity.
    """

    lz_power: float
    energy_fn: Callable[[np.ndarray], np.ndarray]
    argument: ArgumentKind
    parity: Parity = Parity.EVEN
    R_a: float | None = None
    decay_rate: float | None = None
    label: str = ""
    meta: Mapping[str, Any] = field(default_factory=dict, compare=False)
    edge_exponent: float = 0.0

    def __post_init__(self) -> None:
        if not self.edge_exponent > -1:
            raise ValueError(f"component {self.label!r}: edge exponent must exceed -1")
        if self.argument.uses_q and not (self.R_a and self.R_a > 0):
            raise ValueError(f"component {self.label!r}: Q argument needs a positive R_a")

    def argument_value(self, energy: Any, lz: Any) -> np.ndarray:
        energy = np.asarray(energy, dtype=float)
        lz = np.asarray(lz, dtype=float)
        if self.argument is ArgumentKind.Q_BOUNDED:
            return energy - lz**2 / (2 * self.R_a**2)
        if self.argument is ArgumentKind.Q_UNBOUNDED:
            return energy + lz**2 / (2 * self.R_a**2)
        return energy + 0.0 * lz

    def energy_part(self, arg: Any, energy: Any | None = None) -> np.ndarray:
        """``energy_fn`` with the cutoff applied (``arg <= 0`` or ``energy <= 0``)."""
        arg = np.asarray(arg, dtype=float)
        live = arg > 0
        if energy is not None:
            live &= np.broadcast_to(np.asarray(energy) > 0, arg.shape)
        out = np.zeros(arg.shape)
        if live.any():
            out[live] = self.energy_fn(arg[live])
        return out

    def lz_part(self, lz: Any) -> np.ndarray:
        lz = np.asarray(lz, dtype=float)
        a = np.abs(lz)
        with np.errstate(divide="ignore"):
            out = a**self.lz_power if self.lz_power else np.ones_like(a)
        if self.parity is Parity.ODD:
            out = np.sign(lz) * out
        return out

    def __call__(self, energy: Any, lz: Any) -> Any:
        energy, lz = np.broadcast_arrays(np.asarray(energy, dtype=float),
                                         np.asarray(lz, dtype=float))
        out = self.energy_part(self.argument_value(energy, lz), energy) * self.lz_part(lz)
        return out[()] if out.ndim == 0 else out

    def describe(self) -> dict[str, Any]:
        d = {
            "label": self.label,
            "lz_power": self.lz_power,
            "argument": self.argument.value,
            "parity": self.parity.value,
            "R_a": self.R_a,
            "decay_rate": self.decay_rate,
            "edge_exponent": self.edge_exponent,
        }
        d.update(self.meta)
        return d


@dataclass(frozen=True)
class DistributionFunction:
    """Sum of :class:`DFComponent`; the energy argument is ``eps`` or ``E``."""

    components: tuple[DFComponent, ...]
    convention: PotentialConvention = BOUNDED
    label: str = ""

    parity: ClassVar[Parity] = Parity.EVEN

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))
        for c in self.components:
            if c.parity is not self.parity:
                raise ValueError(f"{type(self).__name__} cannot hold {c.parity.value} component {c.label!r}")
            if c.argument.bounded != self.convention.bounded:
                raise ValueError(f"component {c.label!r} does not match the potential convention")

    def __call__(self, energy: Any, lz: Any) -> Any:
        energy, lz = np.broadcast_arrays(np.asarray(energy, dtype=float),
                                         np.asarray(lz, dtype=float))
        out = np.zeros(energy.shape)
        for c in self.components:
            out = out + c(energy, lz)
        return out[()] if out.ndim == 0 else out

    def __add__(self, other: DistributionFunction) -> DistributionFunction:
        if type(self) is not type(other) or self.convention != other.convention:
            raise TypeError("can only add DFs of the same parity and convention")
        return type(self)(self.components + other.components, self.convention,
                          self.label or other.label)

    def scaled(self, factor: float) -> DistributionFunction:
        comps = tuple(_scale_component(c, factor) for c in self.components)
        return type(self)(comps, self.convention, self.label)

    @property
    def decay_rate(self) -> float | None:
        rates = [c.decay_rate for c in self.components if c.decay_rate is not None]
        return min(rates) if rates else None

    def describe(self) -> list[dict[str, Any]]:
        return [c.describe() for c in self.components]


class EvenDF(DistributionFunction):
    parity = Parity.EVEN


class OddDF(DistributionFunction):
    parity = Parity.ODD


def _scale_component(c: DFComponent, factor: float) -> DFComponent:
    fn = c.energy_fn
    return replace(c, energy_fn=lambda x: factor * fn(x))


# }}}


# {{{ Abel synthesis


@dataclass(frozen=True)
class AbelEnergyFunction:
    """``prefactor * [ Abel(integrand)(x) + boundary * x**-alpha ]``."""

    integrand: CoefficientFunction | TabulatedCoefficient
    alpha: float
    prefactor: float
    boundary: float = 0.0
    upper: bool = False

    def __call__(self, x: Any) -> Any:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        pos = x > 0
        if pos.any():
            xp = x[pos]
            if self.upper:
                val = abel_upper(self.integrand, xp, self.alpha)
            else:
                val = abel_lower(self.integrand, xp, self.alpha)
                if self.boundary:
                    val = val + self.boundary * xp ** (-self.alpha)
            out[pos] = self.prefactor * val
        return out[()] if out.ndim == 0 else out


def abel_order(nbeta: float) -> tuple[int, float]:
    """``(a, alpha)`` with ``a`` a non-negative integer and ``alpha = nbeta + 3/2 - a`` in ``[0, 1)``."""
    if not nbeta > -1:
        raise SynthesisError(f"n*beta = {nbeta:g} must exceed -1")
    a = math.floor(nbeta + 1.5)
    alpha = nbeta + 1.5 - a
    if alpha >= 1 - 1e-13:
        a, alpha = a + 1, 0.0
    elif alpha < 1e-13:
        alpha = 0.0
    assert a >= 0 and 0 <= alpha < 1
    return a, alpha


def inversion_constant(nbeta: float, alpha: float) -> float:
    """``K = 1 / (2**(3/2) pi 2**nbeta Gamma(nbeta + 1/2) Gamma(1 - alpha))``."""
    return 1.0 / (2**1.5 * math.pi * 2**nbeta * gamma(nbeta + 0.5) * gamma(1 - alpha))


def _check_bounded_term(term: DensityTerm, a: int, where: str) -> None:
    coeff = term.coeff
    scale = max((abs(at.c) for at in getattr(coeff, "atoms", ())), default=1.0)
    for j in range(a):
        v = derivative(coeff, j).value_at_zero()
        tol = 0.0 if isinstance(coeff, CoefficientFunction) else 1e-8 * scale
        if abs(v) > tol:
            raise SynthesisError(
                f"{where}: boundary condition violated, d^{j} rho_{term.n}/dpsi^{j} at 0 is {v:g} "
                f"(j={j}, n={term.n}); the inversion needs it to vanish for j < {a}")
    if isinstance(coeff, CoefficientFunction):
        for at in coeff.atoms:
            if not float(at.p).is_integer() and not at.p > a:
                raise SynthesisError(
                    f"{where}: non-integer power psi^{at.p:g} needs p > {a} so that its "
                    f"derivative of order {a + 1} is integrable against the Abel weight")


def _term_component(term: DensityTerm, R_a: float | None, convention: PotentialConvention,
                    where: str) -> DFComponent:
    nb = term.nbeta
    if not nb > -0.5:
        raise SynthesisError(
            f"{where}: n*beta = {nb:g}; |L_z|^(2 n beta) is not integrable over velocity space "
            "unless n*beta > -1/2")
    a, alpha = abel_order(nb)
    K = inversion_constant(nb, alpha)
    integrand = derivative(term.coeff, a + 1)
    scaled = term.family is Family.SCALED_RADIAL
    meta = {"n": term.n, "beta": term.beta, "family": term.family.value,
            "a": a, "alpha": alpha, "K": K}

    if convention.bounded:
        _check_bounded_term(term, a, where)
        boundary = derivative(term.coeff, a).value_at_zero()
        fn = AbelEnergyFunction(integrand, alpha, K, boundary, upper=False)
        kind = ArgumentKind.Q_BOUNDED if scaled else ArgumentKind.EPSILON
        rate = None
        edge = -alpha
    else:
        coeff = term.coeff
        if not isinstance(coeff, CoefficientFunction) or not coeff.decays:
            raise DivergenceError(
                f"{where}: unbounded potentials need coefficients decaying like exp(-k Phi), k > 0")
        fn = AbelEnergyFunction(integrand, alpha, (-1) ** (a + 1) * K, 0.0, upper=True)
        kind = ArgumentKind.Q_UNBOUNDED if scaled else ArgumentKind.ENERGY
        rate = coeff.min_decay_rate
        edge = 0.0
    return DFComponent(term.lz_power, fn, kind, Parity.EVEN, R_a if scaled else None,
                       rate, label=f"{term.family.value}[n={term.n}]", meta=meta, edge_exponent=edge)


@dataclass(frozen=True)
class SynthesisRequest:
    expansion: DensityExpansion
    convention: PotentialConvention = BOUNDED
    variant: Variant = Variant.EPSILON

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.variant.unbounded and self.convention.bounded:
            raise SynthesisError(f"variant {self.variant.value} needs an unbounded potential")
        if not self.variant.unbounded and not self.convention.bounded:
            raise SynthesisError(f"variant {self.variant.value} needs a bounded relative potential")
        fams = {t.family for t in self.expansion.terms}
        if self.variant in (Variant.EPSILON, Variant.UNBOUNDED_EPSILON, Variant.Q, Variant.UNBOUNDED_Q):
            want = (Family.SCALED_RADIAL if self.variant in (Variant.Q, Variant.UNBOUNDED_Q)
                    else Family.PURE_RADIAL)
            if fams - {want}:
                raise SynthesisError(f"variant {self.variant.value} accepts only {want.value} terms")
            for i, t in enumerate(self.expansion.terms):
                if t.beta != 1 and t.n != 0:
                    raise SynthesisError(
                        f"terms[{i}]: variant {self.variant.value} needs beta = 1 (use a general variant)")


def synthesize(req: SynthesisRequest) -> EvenDF:
    """Even DF whose velocity integral reproduces ``req.expansion``.

    Components are synthesized term by term and concatenated.
    """
    comps = tuple(_term_component(t, req.expansion.R_a, req.convention, f"terms[{i}]")
                  for i, t in enumerate(req.expansion.terms))
    return EvenDF(comps, req.convention, label=req.variant.value)


def synthesize_even_bounded(expansion: DensityExpansion) -> EvenDF:
    """``f(eps, L_z) = sum_n L_z**(2n) h_n(eps)`` for ``rho = sum_n rho_n(psi) R**(2n)``."""
    return synthesize(SynthesisRequest(expansion, BOUNDED, Variant.EPSILON))


def synthesize_even_q(expansion: DensityExpansion) -> EvenDF:
    """``f(Q, L_z) = sum_n L_z**(2n) g_n(Q)`` for scaled-radial densities."""
    return synthesize(SynthesisRequest(expansion, BOUNDED, Variant.Q))


def synthesize_even_general(expansion: DensityExpansion) -> EvenDF:
    """Both families with arbitrary ``beta`` (``n beta > -1/2``); ``Q`` is clipped at 0."""
    return synthesize(SynthesisRequest(expansion, BOUNDED, Variant.GENERAL))


def synthesize_even_unbounded(expansion: DensityExpansion,
                              variant: Variant | str = Variant.UNBOUNDED_GENERAL) -> EvenDF:
    """Unbounded-potential DFs in ``E`` (and ``Q = E + L_z**2/(2 R_a**2)``)."""
    return synthesize(SynthesisRequest(expansion, UNBOUNDED, Variant(variant)))


# }}}


# {{{ closed forms


def dejonghe_energy_part(p: float, n: int, Q: Any) -> Any:
    """``Gamma(p+1) Q**(p-n-3/2) / (pi 2**(n+3/2) Gamma(n+1/2) Gamma(p-n-1/2))`` for ``Q > 0``, else 0."""
    c = p - n - 0.5
    if c <= 0 and float(c).is_integer():
        raise UnsupportedParameterError(f"Gamma(p - n - 1/2) has a pole at p={p}, n={n}")
    Q = np.asarray(Q, dtype=float)
    pref = gamma(p + 1) / (math.pi * 2 ** (n + 1.5) * gamma(n + 0.5)) * rgamma(c)
    out = np.zeros(Q.shape)
    live = Q > 0
    out[live] = pref * Q[live] ** (p - n - 1.5)
    return out[()] if out.ndim == 0 else out


def dejonghe_powerlaw_df(p: float, n: int, eps: Any, Lz: Any) -> Any:
    """Closed-form even DF for ``rho = psi**p R**(2n) / (1 + R**2)**(n + 1/2)``.

    ``L_z**(2n)`` times :func:`dejonghe_energy_part` at ``eps - L_z**2/2``; zero
    below ``eps = L_z**2 / 2``.
    """
    eps, Lz = np.broadcast_arrays(np.asarray(eps, dtype=float), np.asarray(Lz, dtype=float))
    out = dejonghe_energy_part(p, n, eps - 0.5 * Lz**2) * Lz ** (2 * n)
    return out[()] if np.ndim(out) == 0 else out


def dejonghe_h_df(p: float, a: float, b: float, eps: float, Lz: float) -> float:
    """``Gamma(p+1) eps**(p-3/2) H(a, b, p-1/2, 1/2; L_z**2/(2 eps)) / (2**(3/2) pi Gamma(a+b))``.

    Valid for ``rho = psi**p R**(2a) / (1 + R**2)**(a+b)``.
    """
    if eps <= 0:
        return 0.0
    x = Lz * Lz / (2 * eps)
    return (gamma(p + 1) * eps ** (p - 1.5) / (2**1.5 * math.pi * gamma(a + b))
            * H(a, b, p - 0.5, 0.5, x))


def _exp_fn(k: float, c: float = 1.0) -> Callable[[np.ndarray], np.ndarray]:
    return lambda x: c * np.exp(-k * np.asarray(x, dtype=float))


def exp_pair(n: int, alpha: float, beta: float, R0: float,
             parity: Parity | str = Parity.EVEN
             ) -> tuple[DistributionFunction, Callable[[Any, Any], Any]]:
    """Exponential DF and its closed-form moment for unbounded potentials.

    Even: ``|L_z|**(2n+1) exp(-alpha E - beta L_z**2/(2 R0**2))`` paired with ``rho(Phi, R)``.
    Odd:  ``sgn(L_z) L_z**(2n) exp(...)`` paired with ``rho <v_phi>(Phi, R)``.
    """
    parity = Parity(parity)
    if not alpha > 0:
        raise UnsupportedParameterError(f"exp_pair needs alpha > 0, got {alpha}")
    if beta < 0 or R0 <= 0 or n < 0:
        raise UnsupportedParameterError("exp_pair needs beta >= 0, R0 > 0, n >= 0")
    # exp(-alpha E - beta L^2/(2 R0^2)) = exp(-alpha Q), Q = E + L^2/(2 R_a^2), R_a^2 = alpha R0^2 / beta
    if beta > 0:
        kind, R_a = ArgumentKind.Q_UNBOUNDED, math.sqrt(alpha * R0**2 / beta)
    else:
        kind, R_a = ArgumentKind.ENERGY, None
    power = 2 * n + 1 if parity is Parity.EVEN else 2 * n
    comp = DFComponent(float(power), _exp_fn(alpha), kind, parity, R_a, alpha,
                       label=f"exp_pair[n={n}]",
                       meta={"n": n, "alpha": alpha, "beta": beta, "R0": R0})
    cls = EvenDF if parity is Parity.EVEN else OddDF
    df = cls((comp,), UNBOUNDED, label=f"exp_pair-{parity.value}")
    dfac = double_factorial(2 * n)
    rpow = 2 * n + 1 if parity is Parity.EVEN else 2 * n

    def moment(Phi: Any, R: Any) -> Any:
        Phi = np.asarray(Phi, dtype=float)
        R = np.asarray(R, dtype=float)
        return (4 * math.pi * dfac * R0 ** (2 * (n + 1)) * R**rpow * np.exp(-alpha * Phi)
                / (alpha * (R0**2 * alpha + beta * R**2) ** (n + 1)))

    return df, moment


def binney_odd_components(n: int, v_star: float, R_star: float, v0: float = 1.0,
                          q: float = 1.0, G: float = 1.0) -> OddDF:
    """Odd DF of the logarithmic potential for ``<v_phi> = v* R**(2n+2)/(R***2 + R**2)**(n+1)``.

    Transcribed term by term (``T1`` ... ``T7``); every exponential in ``E`` and
    ``L_z**2`` is written as ``exp(-k Q)`` with ``Q = E + L_z**2/(2 R*^2)``.
    """
    if n < 0:
        raise UnsupportedParameterError("rotation-law index must be non-negative")
    pref = v_star / (4 * math.pi**2 * G * q**2 * v0**2)
    w = 1 - q * q
    k4, k2 = 4 / v0**2, 2 / v0**2
    Ls = R_star * v0           # L_z / (R* v0) is the natural variable
    comps: list[DFComponent] = []

    def add(label: str, coef: float, power: int, k: float, use_q: bool) -> None:
        if coef == 0:
            return
        comps.append(DFComponent(
            float(power), _exp_fn(k, pref * coef), ArgumentKind.Q_UNBOUNDED if use_q else ArgumentKind.ENERGY,
            Parity.ODD, R_star if use_q else None, k, label=label,
            meta={"coefficient": pref * coef, "k": k}))

    add("T1", 16 * w / v0**2, 2, k4, False)
    add("T2", 8 * (1 - (n + 1) * R_star**2 * w), 0, k4, False)
    for j in range(n + 1):
        add(f"T3[j={j}]", -8 * 2 ** (2 * j) / double_factorial(2 * j) / Ls ** (2 * j), 2 * j, k4, True)
    add("T4", 2 * q * q - 1, 0, k2, False)
    if n % 2 == 0:
        sgn_n = 1 if n > 0 else 0
        for k in range(1, n // 2 + 1):
            for j in range(2 * k):
                add(f"T5[k={k},j={j}]", 16 * R_star**2 * w * sgn_n * 2 ** (2 * j)
                    / double_factorial(2 * j) / Ls ** (2 * j), 2 * j, k4, True)
        for j in range(n // 2 + 1):
            add(f"T6[j={j}]", 8 * R_star**2 * w * 2 ** (4 * j) / double_factorial(4 * j)
                / Ls ** (4 * j), 4 * j, k4, True)
    else:
        for k in range((n - 1) // 2 + 1):
            for j in range(2 * k + 1):
                add(f"T5[k={k},j={j}]", 16 * R_star**2 * w * 2 ** (2 * j)
                    / double_factorial(2 * j) / Ls ** (2 * j), 2 * j, k4, True)
        for j in range((n - 1) // 2 + 1):
            add(f"T6[j={j}]", 8 * R_star**2 * w * 2 ** (4 * j + 2) / double_factorial(4 * j + 2)
                / Ls ** (4 * j + 2), 4 * j + 2, k4, True)
    for j in range(n + 1):
        add(f"T7[j={j}]", (1 - 2 * q * q) * 2**j / double_factorial(2 * j) / Ls ** (2 * j),
            2 * j, k2, True)
    return OddDF(tuple(comps), UNBOUNDED, label=f"binney-odd[n={n}]")


def binney_odd_df(n: int, v_star: float, R_star: float, v0: float, q: float,
                  E: Any, Lz: Any, G: float = 1.0) -> Any:
    """Evaluate the odd DF of :func:`binney_odd_components` at ``(E, L_z)``."""
    return binney_odd_components(n, v_star, R_star, v0, q, G)(E, Lz)


def components_by_label(df: DistributionFunction, prefix: str) -> Iterable[DFComponent]:
    return (c for c in df.components if c.label.startswith(prefix))


# }}}
