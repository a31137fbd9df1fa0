"""Velocity dispersions and mean rotation.

For a two-integral DF the second moments follow from the density alone,
regarded as a function of independent ``psi`` and ``R``:

    rho sigma_R**2     = int_0^psi rho(psi', R) dpsi'
    rho <v_phi**2>     = int_0^psi d(R rho(psi', R))/dR dpsi'

(with ``int_Phi^inf`` in place of ``int_0^psi`` for unbounded potentials).
Term by term the ``R`` derivative is exact: a pure term picks up the factor
``2 n beta + 1`` and a scaled term additionally loses half a power of
``1 + R**2/R_a**2``. :func:`dispersion_from_df` integrates the DF directly and
serves as the cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from dfforge.errors import UndefinedMomentError
from dfforge.model import BOUNDED, DensityExpansion, Family, PotentialConvention, eval_density
from dfforge.models import mean_vphi_law
from dfforge.synthesis import EvenDF
from dfforge.velocity import velocity_moment

__all__ = ["MomentField", "dispersion_closed_form", "dispersion_from_df", "mean_vphi_law"]


@dataclass(frozen=True)
class MomentField:
    psi: float
    R: float
    sigma_R2: float
    sigma_z2: float
    sigma_phi2: float
    vbar_phi: float

    @property
    def consistent(self) -> bool:
        """False when the assumed rotation exceeds what ``<v_phi**2>`` allows."""
        return self.sigma_phi2 >= 0

    def as_row(self) -> tuple[float, float, float, float, float]:
        return (self.psi, self.R, self.sigma_R2, self.sigma_phi2, self.vbar_phi)


def _antiderivative(coeff: Any, x: float, bounded: bool) -> float:
    if bounded:
        return float(coeff.integral_from_zero(x))
    return float(coeff.integral_to_infinity(x))


def dispersion_closed_form(expansion: DensityExpansion, psi: float, R: float, vbar_phi: float = 0.0,
                           convention: PotentialConvention = BOUNDED) -> MomentField:
    """Dispersions from the density expansion; ``vbar_phi`` is the assumed mean rotation.

    At ``psi = 0`` in a bounded model every integral is empty and the
    dispersions are reported as zero.
    """
    bounded = convention.bounded
    if bounded and psi == 0:
        return MomentField(psi, R, 0.0, 0.0, 0.0, vbar_phi)
    rho = float(eval_density(expansion, psi, R))
    if not rho > 0:
        raise UndefinedMomentError(f"density is {rho:g} at psi={psi}, R={R}; moments are undefined")
    sr, sp = [], []
    for t in expansion.terms:
        I = _antiderivative(t.coeff, psi, bounded)
        radial = float(expansion.radial_factor(t, R))
        sr.append(radial * I)
        w = 2 * t.nbeta + 1
        if t.family is Family.SCALED_RADIAL:
            w /= 1 + (R / expansion.R_a) ** 2
        sp.append(w * radial * I)
    sigma_R2 = math.fsum(sr) / rho
    vphi2 = math.fsum(sp) / rho
    return MomentField(psi, R, sigma_R2, sigma_R2, vphi2 - vbar_phi**2, vbar_phi)


def dispersion_from_df(df: EvenDF, psi: float, R: float, vbar_phi: float = 0.0, *,
                       tol: float | None = None) -> MomentField:
    """Dispersions by direct velocity-space integration of ``df``.

    ``<v_R**2>`` and ``<v_z**2>`` share one weight, so they agree by
    construction.
    """
    rho = velocity_moment(df, psi, R, "density", tol=tol).value
    if not rho > 0:
        if df.convention.bounded and psi == 0:
            return MomentField(psi, R, 0.0, 0.0, 0.0, vbar_phi)
        raise UndefinedMomentError(f"recovered density is {rho:g} at psi={psi}, R={R}")
    vr2 = velocity_moment(df, psi, R, "vR2", tol=tol).value / rho
    vp2 = velocity_moment(df, psi, R, "vphi2", tol=tol).value / rho
    return MomentField(psi, R, vr2, vr2, vp2 - vbar_phi**2, vbar_phi)


def moment_grid(expansion: DensityExpansion, psi: Any, R: Any, vbar_phi: Any = 0.0,
                convention: PotentialConvention = BOUNDED) -> list[MomentField]:
    psi, R, v = np.broadcast_arrays(np.asarray(psi, float), np.asarray(R, float),
                                    np.asarray(vbar_phi, float))
    return [dispersion_closed_form(expansion, float(a), float(b), float(c), convention)
            for a, b, c in zip(psi.ravel(), R.ravel(), v.ravel())]
