"""Ready-made models: Binney's logarithmic potential, Lynden-Bell's flattened model
and the separable power-law density.

Each bundle carries the potential, the density expansion, the even DF, a
literal reference density for checks and, where one exists in closed form, a
reference DF transcribed as printed in the literature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from dfforge.coefficients import Atom, CoefficientFunction, power
from dfforge.config import get_config
from dfforge.errors import ModelSpecError, UnsupportedParameterError
from dfforge.model import (
    BOUNDED,
    UNBOUNDED,
    DensityExpansion,
    DensityTerm,
    Family,
    ModelDefinition,
)
from dfforge.synthesis import (
    ArgumentKind,
    DFComponent,
    EvenDF,
    OddDF,
    SynthesisRequest,
    Variant,
    binney_odd_components,
    dejonghe_energy_part,
    dejonghe_powerlaw_df,
    synthesize,
)

__all__ = [
    "BinneyParams",
    "LyndenBellParams",
    "FrickeParams",
    "ModelBundle",
    "binney_bundle",
    "lyndenbell_bundle",
    "fricke_powerlaw_bundle",
    "binney_printed_df",
    "lyndenbell_printed_df",
    "lyndenbell_printed_coefficients",
    "lyndenbell_coefficients",
    "mean_vphi_law",
    "parse_builtin",
    "load_bundle",
]


def mean_vphi_law(n: int, v_star: float, R_star: float, R: Any) -> Any:
    """``v* R**(2(n+1)) / (R***2 + R**2)**(n+1)``."""
    if n < 0:
        raise ValueError("rotation-law index must be non-negative")
    R = np.asarray(R, dtype=float)
    x = R * R / (R_star * R_star + R * R)
    out = v_star * x ** (n + 1)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class BinneyParams:
    v0: float = 1.0
    q: float = 0.9
    G: float = field(default_factory=lambda: get_config().G)

    def __post_init__(self) -> None:
        if not self.q > 0:
            raise ModelSpecError("q", f"axial ratio must be positive, got {self.q}")
        if not self.v0 > 0:
            raise ModelSpecError("v0", f"must be positive, got {self.v0}")


@dataclass(frozen=True)
class LyndenBellParams:
    a: float = 0.5
    G: float = field(default_factory=lambda: get_config().G)


@dataclass(frozen=True)
class FrickeParams:
    p: float = 2.5
    n: int = 0

    def __post_init__(self) -> None:
        if not self.p - self.n > 1:
            raise UnsupportedParameterError(f"power-law model needs p - n > 1, got p={self.p}, n={self.n}")


@dataclass(frozen=True)
class ModelBundle:
    """A model with its DF and reference expressions.

    ``potential(R, z)`` is ``Phi`` for unbounded models and the relative
    potential ``psi`` for bounded ones; either way it is the argument of the
    density expansion. ``plane_potential(R)`` is the ordinary potential (up to a
    constant) in the plane ``z = 0`` and defines the physical domain.
    ``density(R, z)`` is the reference density written directly in ``(R, z)``.
    """

    name: str
    params: Any
    model: ModelDefinition
    variant: Variant
    even_df: EvenDF
    potential: Callable[[Any, Any], Any] | None = None
    density: Callable[[Any, Any], Any] | None = None
    reference_df: Callable[[Any, Any], Any] | None = None
    reference_label: str = ""
    odd_df: Callable[..., OddDF] | None = None
    extra: Mapping[str, Any] = field(default_factory=dict)

    @property
    def expansion(self) -> DensityExpansion:
        return self.model.expansion

    @property
    def bounded(self) -> bool:
        return self.model.convention.bounded

    def plane_potential(self, R: Any) -> Any:
        if self.potential is None:
            raise ValueError(f"{self.name} has no potential")
        v = self.potential(R, 0.0)
        return -v if self.bounded else v


# {{{ Binney


def binney_potential(v0: float, q: float) -> Callable[[Any, Any], Any]:
    def Phi(R: Any, z: Any) -> Any:
        R = np.asarray(R, dtype=float)
        z = np.asarray(z, dtype=float)
        return 0.5 * v0 * v0 * np.log1p(R * R + (z / q) ** 2)

    return Phi


def binney_expansion(params: BinneyParams) -> DensityExpansion:
    """Density grouped in powers of ``R**2``, coefficients in ``exp(-k Phi)``."""
    v0, q, G = params.v0, params.q, params.G
    A = v0 * v0 / (4 * math.pi * G * q * q)
    k4, k2 = 4 / v0**2, 2 / v0**2
    rho0 = CoefficientFunction((Atom(2 * A, 0.0, k4), Atom((2 * q * q - 1) * A, 0.0, k2)))
    rho1 = CoefficientFunction((Atom(2 * (1 - q * q) * A, 0.0, k4),))
    terms = [DensityTerm(Family.PURE_RADIAL, 0, 1.0, rho0)]
    if not rho1.is_zero:
        terms.append(DensityTerm(Family.PURE_RADIAL, 1, 1.0, rho1))
    return DensityExpansion(tuple(terms))


def binney_density(params: BinneyParams) -> Callable[[Any, Any], Any]:
    """The density of the logarithmic potential, written directly in ``(R, z)``."""
    v0, q, G = params.v0, params.q, params.G
    Phi = binney_potential(v0, q)

    def rho(R: Any, z: Any) -> Any:
        R = np.asarray(R, dtype=float)
        P = Phi(R, z)
        return v0 * v0 / (4 * math.pi * G * q * q) * (
            2 * ((1 - q * q) * R * R + 1) * np.exp(-4 * P / v0**2)
            + (2 * q * q - 1) * np.exp(-2 * P / v0**2))

    return rho


def binney_printed_df(params: BinneyParams) -> Callable[[Any, Any], Any]:
    """Literal transcription of the even DF as printed in the literature.

    Kept for documentation only: the bracket mixes ``L_z**2`` with ``v0**2``
    and the constants do not reproduce the density. Use the synthesized DF.
    """
    v0, q, G = params.v0, params.q, params.G

    def f(E: Any, Lz: Any) -> Any:
        E = np.asarray(E, dtype=float)
        Lz = np.asarray(Lz, dtype=float)
        out = (2**4.5 * ((1 - q * q) * Lz**2 + 2**2.5 * v0**2) * np.exp(-4 * E / v0**2)
               + (2 * q * q - 1) * v0**2 * np.exp(-2 * E / v0**2)) / (4 * math.pi * G * q * q * v0**3)
        return np.where(E > 0, out, 0.0)

    return f


def binney_bundle(params: BinneyParams = BinneyParams()) -> ModelBundle:
    """Logarithmic potential ``Phi = v0**2/2 ln(1 + R**2 + z**2/q**2)`` (unbounded)."""
    expansion = binney_expansion(params)
    model = ModelDefinition(expansion, UNBOUNDED, params.G, "binney", Variant.UNBOUNDED_EPSILON.value,
                            {"v0": params.v0, "q": params.q})
    df = synthesize(SynthesisRequest(expansion, UNBOUNDED, Variant.UNBOUNDED_EPSILON))
    Phi = binney_potential(params.v0, params.q)
    rho = binney_density(params)

    def odd(n: int = 0, v_star: float = 1.0, R_star: float = 1.0) -> OddDF:
        return binney_odd_components(n, v_star, R_star, params.v0, params.q, params.G)

    def rotation_target(n: int, v_star: float, R_star: float, R: Any, z: Any) -> Any:
        """``rho R <v_phi>`` for the rotation law of index ``n``."""
        return rho(R, z) * np.asarray(R, dtype=float) * mean_vphi_law(n, v_star, R_star, R)

    return ModelBundle("binney", params, model, Variant.UNBOUNDED_EPSILON, df, Phi, rho,
                       binney_printed_df(params), "printed even DF (inconsistent; not used)", odd,
                       {"rotation_target": rotation_target})


# }}}


# {{{ Lynden-Bell


def lyndenbell_potential(a: float) -> Callable[[Any, Any], Any]:
    def psi(R: Any, z: Any) -> Any:
        R = np.asarray(R, dtype=float)
        z = np.asarray(z, dtype=float)
        return ((R * R + z * z + 1) ** 2 + a * R * R) ** -0.25

    return psi


def lyndenbell_expansion(params: LyndenBellParams) -> DensityExpansion:
    a, G = params.a, params.G
    c = 1 / (4 * math.pi * G)
    terms = [DensityTerm(Family.PURE_RADIAL, 0, 1.0, power(5, (3 + a) * c))]
    if a != 0:
        terms.append(DensityTerm(Family.PURE_RADIAL, 1, 1.0, power(9, -5 * a * (1 + a / 4) * c)))
    return DensityExpansion(tuple(terms))


def lyndenbell_density(params: LyndenBellParams) -> Callable[[Any, Any], Any]:
    a, G = params.a, params.G
    psi = lyndenbell_potential(a)

    def rho(R: Any, z: Any) -> Any:
        R = np.asarray(R, dtype=float)
        p = psi(R, z)
        return p**5 / (4 * math.pi * G) * ((3 + a) - 5 * a * (1 + a / 4) * R * R * p**4)

    return rho


def lyndenbell_printed_coefficients(a: float) -> tuple[float, float]:
    """Coefficients of ``eps**(7/2)`` and ``eps**(13/2) L_z**2`` in the printed DF.

    The printed DF omits the ``1/(4 pi G)`` of the density, so these equal
    ``4 pi G`` times the coefficients of the synthesized DF.
    """
    s = 1 / (2**1.5 * math.pi**2)
    return s * 2**7 * (3 + a) / 7, -s * 15 * a * (4 + a) * 2**12 / 143


def lyndenbell_printed_df(a: float) -> Callable[[Any, Any], Any]:
    c0, c1 = lyndenbell_printed_coefficients(a)

    def f(eps: Any, Lz: Any) -> Any:
        eps = np.asarray(eps, dtype=float)
        Lz = np.asarray(Lz, dtype=float)
        e = np.maximum(eps, 0.0)
        return np.where(eps > 0, e**3.5 * (c0 + c1 * e**3 * Lz**2), 0.0)

    return f


def lyndenbell_coefficients(df: EvenDF, eps: float = 1.0) -> tuple[float, float]:
    """Read ``(c0, c1)`` off a synthesized DF ``c0 eps**(7/2) + c1 eps**(13/2) L_z**2``."""
    c0 = c1 = 0.0
    for comp in df.components:
        val = float(comp.energy_fn(np.array([eps]))[0])
        if comp.lz_power == 0:
            c0 += val / eps**3.5
        elif comp.lz_power == 2:
            c1 += val / eps**6.5
        else:
            raise ValueError(f"unexpected L_z power {comp.lz_power}")
    return c0, c1


def lyndenbell_bundle(params: LyndenBellParams = LyndenBellParams()) -> ModelBundle:
    """Relative potential ``psi = [(R**2 + z**2 + 1)**2 + a R**2]**(-1/4)`` (bounded)."""
    expansion = lyndenbell_expansion(params)
    model = ModelDefinition(expansion, BOUNDED, params.G, "lyndenbell", Variant.EPSILON.value,
                            {"a": params.a})
    df = synthesize(SynthesisRequest(expansion, BOUNDED, Variant.EPSILON))
    return ModelBundle("lyndenbell", params, model, Variant.EPSILON, df,
                       lyndenbell_potential(params.a), lyndenbell_density(params),
                       lyndenbell_printed_df(params.a), "printed even DF (times 4 pi G)")


# }}}


# {{{ separable power law


def fricke_expansion(params: FrickeParams) -> DensityExpansion:
    return DensityExpansion((DensityTerm(Family.SCALED_RADIAL, params.n, 1.0, power(params.p)),), R_a=1.0)


def fricke_powerlaw_bundle(params: FrickeParams = FrickeParams()) -> ModelBundle:
    """``rho = psi**p R**(2n) / (1 + R**2)**(n + 1/2)`` with its closed-form DF.

    No potential is attached: the model is specified directly in ``(psi, R)``.
    """
    p, n = params.p, params.n
    expansion = fricke_expansion(params)
    model = ModelDefinition(expansion, BOUNDED, 1.0, "fricke", Variant.Q.value, {"p": p, "n": n})
    comp = DFComponent(
        float(2 * n),
        lambda Q: dejonghe_energy_part(p, n, Q),
        ArgumentKind.Q_BOUNDED, R_a=1.0, label=f"power-law[n={n}]", meta={"p": p, "n": n},
        edge_exponent=min(0.0, p - n - 1.5))
    df = EvenDF((comp,), BOUNDED, label="closed-form")

    def rho(psi: Any, R: Any) -> Any:
        psi = np.asarray(psi, dtype=float)
        R = np.asarray(R, dtype=float)
        return psi**p * R ** (2 * n) / (1 + R * R) ** (n + 0.5)

    return ModelBundle("fricke", params, model, Variant.Q, df, None, None,
                       lambda eps, Lz: dejonghe_powerlaw_df(p, n, eps, Lz), "closed-form DF",
                       extra={"density_psi_R": rho})


# }}}


# {{{ CLI addressing


_BUILDERS: dict[str, tuple[type, Callable[[Any], ModelBundle]]] = {
    "binney": (BinneyParams, binney_bundle),
    "lyndenbell": (LyndenBellParams, lyndenbell_bundle),
    "fricke": (FrickeParams, fricke_powerlaw_bundle),
}


def parse_builtin(ref: str) -> tuple[str, dict[str, float]]:
    """``"binney:v0=1,q=0.9"`` -> ``("binney", {"v0": 1.0, "q": 0.9})``."""
    name, _, rest = ref.partition(":")
    name = name.strip().lower()
    if name not in _BUILDERS:
        raise ModelSpecError("builtin", f"unknown model {name!r}; choose from {sorted(_BUILDERS)}")
    kwargs: dict[str, float] = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ModelSpecError(f"builtin.{item}", "expected key=value")
        try:
            kwargs[key.strip()] = float(val)
        except ValueError:
            raise ModelSpecError(f"builtin.{key.strip()}", f"not a number: {val!r}") from None
    return name, kwargs


def load_bundle(ref: str) -> ModelBundle:
    name, kwargs = parse_builtin(ref)
    cls, build = _BUILDERS[name]
    allowed = set(cls.__dataclass_fields__)
    unknown = set(kwargs) - allowed
    if unknown:
        raise ModelSpecError(f"builtin.{sorted(unknown)[0]}", f"unknown parameter for {name}")
    if "n" in kwargs:
        if not float(kwargs["n"]).is_integer():
            raise ModelSpecError("builtin.n", "must be an integer")
        kwargs["n"] = int(kwargs["n"])
    return build(cls(**kwargs))


# }}}
