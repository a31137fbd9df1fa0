"""Independent checks of synthesized DFs.

* :func:`recover_density` and :func:`recover_rotation` integrate a DF over
  velocity space and return the density or ``rho R <v_phi>`` with an error
  estimate.
* :func:`positivity_scan` evaluates a DF over the physical part of the
  ``(energy, L_z)`` plane and reports where it goes negative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np
from scipy import optimize

from dfforge.errors import DomainError
from dfforge.synthesis import DistributionFunction, EvenDF, OddDF, Parity
from dfforge.velocity import Estimate, velocity_moment

__all__ = [
    "Estimate",
    "recover_density",
    "recover_rotation",
    "PhysicalDomain",
    "ScanSpec",
    "PositivityReport",
    "positivity_scan",
    "scan_points",
]


def recover_density(df: EvenDF, pot: float, R: float, *, tol: float | None = None) -> Estimate:
    """Density reproduced by ``df`` at potential argument ``pot`` (``psi`` or ``Phi``) and radius ``R``."""
    if df.parity is not Parity.EVEN:
        raise ValueError("density recovery needs an even DF")
    if not df.components:
        return Estimate(0.0, 0.0)
    return velocity_moment(df, float(pot), float(R), "density", tol=tol)


def recover_rotation(df: OddDF, Phi: float, R: float, *, tol: float | None = None) -> Estimate:
    """``rho R <v_phi>`` produced by an odd DF."""
    if df.parity is not Parity.ODD:
        raise ValueError("rotation recovery needs an odd DF")
    if not df.components:
        return Estimate(0.0, 0.0)
    e = velocity_moment(df, float(Phi), float(R), "vphi", tol=tol)
    return Estimate(R * e.value, R * e.error, e.level)


# {{{ physical domain


@dataclass(frozen=True)
class PhysicalDomain:
    """Orbits allowed in a potential, from its equatorial profile.

    ``plane_potential(R)`` is the potential (not the relative potential) in
    the plane ``z = 0``. An orbit with angular momentum ``L`` needs at least
    the circular-orbit energy ``min_R [Phi(R) + L**2 / (2 R**2)]``. For bounded
    models energies are relative, so this becomes the largest admissible
    ``eps``.
    """

    plane_potential: Callable[[Any], Any]
    bounded: bool
    r_min: float = 1e-6
    r_max: float = 1e6

    def _min_effective(self, L: float) -> tuple[float, float]:
        U = lambda logR: float(self.plane_potential(math.exp(logR)) + 0.5 * L * L * math.exp(-2 * logR))
        if L == 0:
            grid = np.linspace(math.log(self.r_min), math.log(self.r_max), 801)
            vals = [U(g) for g in grid]
            i = int(np.argmin(vals))
            R0 = 0.0 if i == 0 else math.exp(grid[i])
            return (float(self.plane_potential(0.0)) if i == 0 else vals[i]), R0
        grid = np.linspace(math.log(self.r_min), math.log(self.r_max), 801)
        vals = np.array([U(g) for g in grid])
        i = int(np.argmin(vals))
        lo, hi = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        res = optimize.minimize_scalar(U, bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12})
        return float(res.fun), math.exp(res.x)

    def energy_limit(self, L: float) -> float:
        """Circular-orbit energy (unbounded) or the largest relative energy (bounded)."""
        u, _ = self._min_effective(abs(L))
        return -u if self.bounded else u

    def circular_radius(self, L: float) -> float:
        return self._min_effective(abs(L))[1]

    def boundary(self, lz: Sequence[float]) -> np.ndarray:
        """``(energy, L_z)`` pairs along the edge of the domain."""
        lz = np.asarray(lz, dtype=float)
        return np.column_stack([[self.energy_limit(L) for L in lz], lz])


@dataclass(frozen=True)
class ScanSpec:
    """Grid over the physical domain.

    In the default envelope mode, ``|L_z| <= lz_max`` and energies run from the
    domain edge inward: ``(0, eps_max(L)]`` for bounded models or
    ``[E_c(L), E_c(L) + e_span]`` for unbounded ones, crowded toward the edge.
    With ``fixed_radii``, the points are those reachable at each listed
    radius in the plane. Without a domain, a plain rectangle
    ``(0, e_max] x [-lz_max, lz_max]`` is used.
    """

    lz_max: float = 10.0
    lz_steps: int = 81
    e_steps: int = 81
    e_span: float | None = None
    e_max: float = 1.0
    fixed_radii: tuple[float, ...] | None = None
    tol_neg: float = 1e-12


def _edge_fractions(n: int) -> np.ndarray:
    s = np.linspace(0.0, 1.0, n)
    return s * s


def scan_points(df: DistributionFunction, domain: PhysicalDomain | None,
                spec: ScanSpec = ScanSpec()) -> tuple[np.ndarray, np.ndarray]:
    """Energies and angular momenta (flat arrays) visited by :func:`positivity_scan`."""
    bounded = df.convention.bounded
    span = spec.e_span
    if span is None and not bounded:
        rate = df.decay_rate or 1.0
        span = 46.0 / rate
    E_all, L_all = [], []
    if domain is None:
        E = np.linspace(0.0, spec.e_max, spec.e_steps + 1)[1:]
        L = np.linspace(-spec.lz_max, spec.lz_max, spec.lz_steps)
        EE, LL = np.meshgrid(E, L, indexing="ij")
        return EE.ravel(), LL.ravel()
    if domain.bounded != bounded:
        raise DomainError("physical domain and DF use different energy conventions")

    if spec.fixed_radii is None:
        half = np.linspace(0.0, spec.lz_max, (spec.lz_steps + 1) // 2)
        for L in half:
            lim = domain.energy_limit(L)
            if bounded:
                if lim <= 0:
                    continue
                E = lim * (1 - _edge_fractions(spec.e_steps + 1)[:-1])
            else:
                E = lim + span * _edge_fractions(spec.e_steps)
            for sgn in ((1.0,) if L == 0 else (1.0, -1.0)):
                E_all.append(E)
                L_all.append(np.full(E.shape, sgn * L))
    else:
        for R in spec.fixed_radii:
            u = float(domain.plane_potential(R))
            if bounded:
                psi = -u
                E = psi * np.linspace(0.0, 1.0, spec.e_steps + 1)[1:]
                K = psi - E
            else:
                E = u + span * _edge_fractions(spec.e_steps)
                K = E - u
            frac = np.linspace(-1.0, 1.0, spec.lz_steps)
            Lmax = R * np.sqrt(2 * np.maximum(K, 0.0))
            EE = np.repeat(E, frac.size)
            LL = (Lmax[:, None] * frac[None, :]).ravel()
            E_all.append(EE)
            L_all.append(LL)
    return np.concatenate(E_all), np.concatenate(L_all)


@dataclass(frozen=True)
class PositivityReport:
    min_value: float
    argmin: tuple[float, float]
    negative_fraction: float
    flagged: bool
    scale: float
    n_points: int
    tol_neg: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "min": self.min_value,
            "argmin": {"energy": self.argmin[0], "Lz": self.argmin[1]},
            "negative_fraction": self.negative_fraction,
            "flagged": self.flagged,
            "scale": self.scale,
            "n_points": self.n_points,
            "tol_neg": self.tol_neg,
        }


def positivity_scan(df: DistributionFunction, domain: PhysicalDomain | None = None,
                    spec: ScanSpec = ScanSpec()) -> PositivityReport:
    """Evaluate ``df`` on :func:`scan_points` and flag values below ``-tol_neg * max f``."""
    E, L = scan_points(df, domain, spec)
    f = np.asarray(df(E, L), dtype=float)
    if not np.all(np.isfinite(f)):
        raise DomainError("DF is not finite on the scan grid")
    scale = float(np.max(np.abs(f))) if f.size else 0.0
    thresh = spec.tol_neg * scale
    i = int(np.argmin(f))
    neg = f < -thresh
    return PositivityReport(float(f[i]), (float(E[i]), float(L[i])), float(np.mean(neg)),
                            bool(neg.any()), scale, int(f.size), spec.tol_neg)


# }}}
