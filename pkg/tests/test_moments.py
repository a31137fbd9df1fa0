
import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy import integrate

from dfforge.coefficients import exponential, power
from dfforge.errors import UndefinedMomentError
from dfforge.model import UNBOUNDED, DensityExpansion, DensityTerm, Family, eval_density
from dfforge.models import BinneyParams, LyndenBellParams, binney_bundle, lyndenbell_bundle
from dfforge.moments import dispersion_closed_form, dispersion_from_df, moment_grid
from dfforge.synthesis import synthesize_even_general


def test_isotropic_power_law_dispersion():
    exp = DensityExpansion((DensityTerm(Family.PURE_RADIAL, 0, 1.0, power(5)),))
    for psi in (0.2, 0.9):
        m = dispersion_closed_form(exp, psi, 1.3)
        assert_allclose([m.sigma_R2, m.sigma_z2, m.sigma_phi2], psi / 6, rtol=1e-14)


def test_closed_form_against_quadrature_of_density():
    exp = DensityExpansion((DensityTerm(Family.PURE_RADIAL, 0, 1.0, power(3)),
                            DensityTerm(Family.SCALED_RADIAL, 1, 0.5, power(4, 0.6))), R_a=1.7)
    psi, R = 0.8, 1.1
    rho = eval_density(exp, psi, R)
    sR, _ = integrate.quad(lambda p: eval_density(exp, p, R), 0, psi, epsabs=0, epsrel=1e-13)
    d = lambda r: integrate.quad(lambda p: r * eval_density(exp, p, r), 0, psi, epsabs=0, epsrel=1e-13)[0]
    h = 1e-4
    sP = (d(R + h) - d(R - h)) / (2 * h)
    m = dispersion_closed_form(exp, psi, R)
    assert_allclose(m.sigma_R2, sR / rho, rtol=1e-12)
    assert_allclose(m.sigma_phi2, sP / rho, rtol=1e-7)


def test_unbounded_closed_form():
    exp = DensityExpansion((DensityTerm(Family.PURE_RADIAL, 0, 1.0, exponential(2.0)),))
    m = dispersion_closed_form(exp, 0.5, 1.0, convention=UNBOUNDED)
    assert_allclose(m.sigma_R2, 0.5, rtol=1e-14)


@pytest.mark.parametrize("bundle", [lyndenbell_bundle(LyndenBellParams(a=2.0)), binney_bundle(BinneyParams(q=0.8))],
                         ids=["lyndenbell", "binney"])
def test_closed_form_matches_direct_integration(bundle):
    conv = bundle.model.convention
    for psi, R in [(0.3, 1.0), (0.7, 0.5)]:
        a = dispersion_closed_form(bundle.expansion, psi, R, convention=conv)
        b = dispersion_from_df(bundle.even_df, psi, R)
        assert_allclose(a.as_row(), b.as_row(), rtol=1e-9)
        assert b.sigma_R2 == b.sigma_z2


def test_rotation_is_subtracted():
    exp = DensityExpansion((DensityTerm(Family.PURE_RADIAL, 0, 1.0, power(5)),))
    m = dispersion_closed_form(exp, 0.6, 1.0, vbar_phi=0.2)
    assert_allclose(m.sigma_phi2, 0.1 - 0.04)
    assert m.consistent
    assert not dispersion_closed_form(exp, 0.6, 1.0, vbar_phi=0.5).consistent


def test_escape_surface_and_negative_density():
    lb = lyndenbell_bundle(LyndenBellParams(a=0.5))
    m = dispersion_closed_form(lb.expansion, 0.0, 1.0)
    assert (m.sigma_R2, m.sigma_phi2) == (0.0, 0.0)
    assert dispersion_from_df(lb.even_df, 0.0, 1.0).sigma_R2 == 0.0
    with pytest.raises(UndefinedMomentError):
        dispersion_closed_form(lb.expansion, 1.0, 2.0)


def test_moment_grid_broadcasts():
    exp = DensityExpansion((DensityTerm(Family.PURE_RADIAL, 0, 1.0, power(5)),))
    rows = moment_grid(exp, np.array([[0.1], [0.5]]), np.array([0.5, 1.0, 2.0]))
    assert len(rows) == 6
    assert_allclose([r.sigma_R2 for r in rows], np.repeat([0.1 / 6, 0.5 / 6], 3))


def test_general_family_matches_direct():
    exp = DensityExpansion((DensityTerm(Family.PURE_RADIAL, 0, 1.0, power(3)),
                            DensityTerm(Family.SCALED_RADIAL, 2, 0.3, power(4.5, 0.7))), R_a=1.5)
    df = synthesize_even_general(exp)
    a = dispersion_closed_form(exp, 0.5, 0.8)
    b = dispersion_from_df(df, 0.5, 0.8)
    assert_allclose(a.as_row(), b.as_row(), rtol=1e-9)
