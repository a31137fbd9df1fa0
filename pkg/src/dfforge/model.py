"""Domain types: phase-space points, potential conventions, density expansions.

A density is written as a potential-radius expansion

    rho(psi, R) = sum_n rho_n(psi) R**(2 n beta_n)
                + sum_n rhohat_n(psi) R**(2 n beta_n) / (1 + R**2/R_a**2)**(n beta_n + 1/2)

where the first family is :attr:`Family.PURE_RADIAL` and the second
:attr:`Family.SCALED_RADIAL`. ``psi`` is the relative potential for bounded
models and the potential ``Phi`` itself for unbounded ones.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from dfforge.coefficients import Atom, CoefficientFunction
from dfforge.errors import AdmissibilityError, ConfigurationError, DomainError, ModelSpecError

__all__ = [
    "PhasePoint",
    "ConventionKind",
    "PotentialConvention",
    "Family",
    "DensityTerm",
    "DensityExpansion",
    "ModelDefinition",
    "eval_density",
    "relative_energy",
    "parse_model_spec",
    "serialize_model_spec",
    "SCHEMA_VERSION",
]

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class PhasePoint:
    """Position and velocity in cylindrical coordinates."""

    R: float
    z: float
    v_R: float = 0.0
    v_phi: float = 0.0
    v_z: float = 0.0

    def __post_init__(self) -> None:
        if self.R < 0:
            raise DomainError(f"cylindrical radius must be non-negative: R={self.R}")

    @property
    def Lz(self) -> float:
        return self.R * self.v_phi if self.R > 0 else 0.0

    @property
    def speed2(self) -> float:
        return self.v_R**2 + self.v_phi**2 + self.v_z**2


class ConventionKind(str, enum.Enum):
    RELATIVE_BOUNDED = "relative_bounded"
    UNBOUNDED_RISING = "unbounded_rising"


@dataclass(frozen=True)
class PotentialConvention:
    """How the potential argument of the expansion is to be read.

    ``RELATIVE_BOUNDED``: the argument is ``psi = -Phi + Phi0 >= 0`` and stars
    have relative energy ``eps > 0``. ``UNBOUNDED_RISING``: the argument is
    ``Phi`` itself, which grows without bound, and stars have ``E > 0``.
    """

    kind: ConventionKind = ConventionKind.RELATIVE_BOUNDED
    phi0: float = 0.0

    @property
    def bounded(self) -> bool:
        return self.kind is ConventionKind.RELATIVE_BOUNDED


BOUNDED = PotentialConvention(ConventionKind.RELATIVE_BOUNDED)
UNBOUNDED = PotentialConvention(ConventionKind.UNBOUNDED_RISING)


class Family(str, enum.Enum):
    PURE_RADIAL = "pure_radial"
    """``rho_n(psi) R**(2 n beta)``."""
    SCALED_RADIAL = "scaled_radial"
    """``rhohat_n(psi) R**(2 n beta) / (1 + R**2/R_a**2)**(n beta + 1/2)``."""


@dataclass(frozen=True)
class DensityTerm:
    family: Family
    n: int
    beta: float
    coeff: CoefficientFunction

    @property
    def lz_power(self) -> float:
        """Exponent ``2 n beta`` shared by the radial factor and the DF component."""
        return 2.0 * self.n * self.beta

    @property
    def nbeta(self) -> float:
        return self.n * self.beta


@dataclass(frozen=True)
class DensityExpansion:
    terms: tuple[DensityTerm, ...]
    R_a: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple(self.terms))
        for i, t in enumerate(self.terms):
            if t.n < 0:
                raise ModelSpecError(f"terms[{i}].n", f"must be a non-negative integer, got {t.n}")
            if not t.nbeta > -1:
                raise AdmissibilityError(f"terms[{i}].beta",
                                         f"n*beta = {t.nbeta:g} must exceed -1")
        if any(t.family is Family.SCALED_RADIAL for t in self.terms):
            if self.R_a is None:
                raise ConfigurationError("R_a", "required by scaled_radial terms")
        if self.R_a is not None and not self.R_a > 0:
            raise ConfigurationError("R_a", f"must be positive, got {self.R_a}")

    @property
    def m(self) -> int:
        return max((t.n for t in self.terms), default=0)

    def __add__(self, other: DensityExpansion) -> DensityExpansion:
        if self.R_a is not None and other.R_a is not None and self.R_a != other.R_a:
            raise ConfigurationError("R_a", "cannot concatenate expansions with different R_a")
        return DensityExpansion(self.terms + other.terms,
                                self.R_a if self.R_a is not None else other.R_a)

    def scaled(self, factor: float) -> DensityExpansion:
        return DensityExpansion(tuple(DensityTerm(t.family, t.n, t.beta, t.coeff * factor)
                                      for t in self.terms), self.R_a)

    def radial_factor(self, term: DensityTerm, R: Any) -> Any:
        """The ``R`` dependence multiplying ``term.coeff``."""
        R = np.asarray(R, dtype=float)
        s = term.lz_power
        if s < 0 and np.any(R == 0):
            raise DomainError(f"R = 0 with negative radial exponent {s:g}")
        out = np.power(R, s) if s else np.ones_like(R)
        if term.family is Family.SCALED_RADIAL:
            assert self.R_a is not None
            out = out / (1.0 + (R / self.R_a) ** 2) ** (term.nbeta + 0.5)
        return out


def eval_density(expansion: DensityExpansion, psi: Any, R: Any) -> Any:
    """Mass density of the expansion at potential argument ``psi`` and radius ``R``.

    The result may be negative; positivity is a property of the model.
    """
    psi = np.asarray(psi, dtype=float)
    R = np.asarray(R, dtype=float)
    if np.any(R < 0):
        raise DomainError("R must be non-negative")
    out = np.zeros(np.broadcast(psi, R).shape)
    for t in expansion.terms:
        out = out + t.coeff(psi) * expansion.radial_factor(t, R)
    return out[()] if out.ndim == 0 else out


def relative_energy(point: PhasePoint, psi: float) -> float:
    """``eps = psi - |v|^2 / 2``; values ``<= 0`` lie outside the system."""
    return psi - 0.5 * point.speed2


# {{{ model definitions and the spec file


@dataclass(frozen=True)
class ModelDefinition:
    expansion: DensityExpansion
    convention: PotentialConvention = BOUNDED
    G: float = 1.0
    name: str = "model"
    variant: str | None = None
    extra: Mapping[str, Any] = field(default_factory=dict)


def _require(doc: Mapping[str, Any], key: str, where: str) -> Any:
    if key not in doc:
        raise ModelSpecError(f"{where}{key}", "missing required field")
    return doc[key]


def _number(value: Any, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ModelSpecError(where, f"expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ModelSpecError(where, f"must be finite, got {value!r}")
    return float(value)


def _enum(cls: type[enum.Enum], value: Any, where: str) -> Any:
    try:
        return cls(value)
    except ValueError:
        allowed = ", ".join(m.value for m in cls)  # type: ignore[attr-defined]
        raise ModelSpecError(where, f"expected one of {{{allowed}}}, got {value!r}") from None


def model_from_dict(doc: Mapping[str, Any]) -> ModelDefinition:
    if not isinstance(doc, Mapping):
        raise ModelSpecError("<root>", "expected an object")
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ModelSpecError("schema_version", f"unsupported version {version!r}")
    kind = _enum(ConventionKind, doc.get("convention", ConventionKind.RELATIVE_BOUNDED.value),
                 "convention")
    phi0 = _number(doc.get("phi0", 0.0), "phi0")
    G = _number(doc.get("G", 1.0), "G")
    if G <= 0:
        raise ModelSpecError("G", "must be positive")
    R_a = doc.get("R_a")
    if R_a is not None:
        R_a = _number(R_a, "R_a")

    raw_terms = _require(doc, "terms", "")
    if not isinstance(raw_terms, list) or not raw_terms:
        raise ModelSpecError("terms", "expected a non-empty array")
    terms = []
    for i, rt in enumerate(raw_terms):
        where = f"terms[{i}]."
        if not isinstance(rt, Mapping):
            raise ModelSpecError(f"terms[{i}]", "expected an object")
        family = _enum(Family, rt.get("family", Family.PURE_RADIAL.value), where + "family")
        n = _require(rt, "n", where)
        if isinstance(n, bool) or not isinstance(n, int) or n < 0:
            raise ModelSpecError(where + "n", f"expected a non-negative integer, got {n!r}")
        beta = _number(rt.get("beta", 1.0), where + "beta")
        raw_coeff = _require(rt, "coeff", where)
        if not isinstance(raw_coeff, list) or not raw_coeff:
            raise ModelSpecError(where + "coeff", "expected a non-empty array of atoms")
        atoms = []
        for j, ra in enumerate(raw_coeff):
            aw = f"{where}coeff[{j}]."
            if not isinstance(ra, Mapping):
                raise ModelSpecError(aw[:-1], "expected an object {c, p, k}")
            c = _number(_require(ra, "c", aw), aw + "c")
            p = _number(ra.get("p", 0.0), aw + "p")
            k = _number(ra.get("k", 0.0), aw + "k")
            if k < 0:
                raise ModelSpecError(aw + "k", "decay rate must be non-negative")
            if p < 0:
                raise ModelSpecError(aw + "p", "power must be non-negative")
            atoms.append(Atom(c, p, k))
        terms.append(DensityTerm(family, n, beta, CoefficientFunction(tuple(atoms))))

    expansion = DensityExpansion(tuple(terms), R_a)
    variant = doc.get("variant")
    if variant is not None and not isinstance(variant, str):
        raise ModelSpecError("variant", "expected a string")
    known = {"schema_version", "convention", "phi0", "G", "R_a", "terms", "variant", "name"}
    extra = {k: v for k, v in doc.items() if k not in known}
    return ModelDefinition(expansion, PotentialConvention(kind, phi0), G,
                           str(doc.get("name", "model")), variant, extra)


def model_to_dict(model: ModelDefinition) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "name": model.name,
        "convention": model.convention.kind.value,
        "phi0": model.convention.phi0,
        "G": model.G,
        "terms": [
            {"family": t.family.value, "n": t.n, "beta": t.beta, "coeff": t.coeff.to_triples()}
            for t in model.expansion.terms
        ],
    }
    if model.expansion.R_a is not None:
        doc["R_a"] = model.expansion.R_a
    if model.variant is not None:
        doc["variant"] = model.variant
    doc.update(model.extra)
    return doc


def parse_model_spec(text: str) -> ModelDefinition:
    """Parse and validate a JSON model specification document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelSpecError("<document>", f"invalid JSON: {exc}") from None
    return model_from_dict(doc)


def serialize_model_spec(model: ModelDefinition) -> str:
    return json.dumps(model_to_dict(model), indent=2, sort_keys=True)


# }}}
