import math

import mpmath as mp
import numpy as np
import pytest
from numpy.testing import assert_allclose

from dfforge.errors import ModelSpecError, UnsupportedParameterError
from dfforge.model import eval_density
from dfforge.models import (
    BinneyParams,
    FrickeParams,
    LyndenBellParams,
    binney_bundle,
    fricke_powerlaw_bundle,
    load_bundle,
    lyndenbell_bundle,
    lyndenbell_coefficients,
    lyndenbell_printed_coefficients,
    mean_vphi_law,
    parse_builtin,
)
from dfforge.synthesis import components_by_label
from dfforge.verify import recover_density, recover_rotation

mp.mp.dps = 30


def poisson_density(Phi, R, z, G=1.0):
    """``laplacian(Phi) / (4 pi G)`` in cylindrical coordinates, by mpmath differentiation."""
    R, z = mp.mpf(R), mp.mpf(z)
    f = lambda r, zz: Phi(r, zz)
    lap = mp.diff(f, (R, z), (2, 0)) + mp.diff(f, (R, z), (1, 0)) / R + mp.diff(f, (R, z), (0, 2))
    return float(lap / (4 * mp.pi * G))


POINTS = [(0.5, 0.2), (1.3, 0.0), (2.0, 1.5)]


@pytest.mark.parametrize("q", [1.0, 0.9, 0.8])
def test_binney_density_from_poisson(q):
    b = binney_bundle(BinneyParams(q=q))
    Phi = lambda R, z: 0.5 * mp.log(1 + R * R + (z / q) ** 2)
    for R, z in POINTS:
        want = poisson_density(Phi, R, z)
        assert_allclose(b.density(R, z), want, rtol=1e-12)
        assert_allclose(eval_density(b.expansion, b.potential(R, z), R), want, rtol=1e-12)


@pytest.mark.parametrize("a", [0.0, 0.5, 2.0])
def test_lyndenbell_density_from_poisson(a):
    b = lyndenbell_bundle(LyndenBellParams(a=a))
    psi = lambda R, z: ((R * R + z * z + 1) ** 2 + a * R * R) ** mp.mpf(-0.25)
    for R, z in POINTS:
        want = poisson_density(lambda r, zz: -psi(r, zz), R, z)
        assert_allclose(b.density(R, z), want, rtol=1e-12)
        assert_allclose(eval_density(b.expansion, b.potential(R, z), R), want, rtol=1e-12)


@pytest.mark.parametrize("a", [0.0, 0.5, 2.0])
def test_lyndenbell_coefficients(a):
    b = lyndenbell_bundle(LyndenBellParams(a=a))
    got = np.array(lyndenbell_coefficients(b.even_df)) * 4 * math.pi
    assert_allclose(got, lyndenbell_printed_coefficients(a), rtol=1e-12, atol=0)


def test_binney_printed_df_is_inconsistent():
    b = binney_bundle(BinneyParams(q=0.9))
    E, L = 0.8, 0.5
    assert abs(b.reference_df(E, L) / b.even_df(E, L) - 1) > 0.1


def test_fricke_bundle():
    b = fricke_powerlaw_bundle(FrickeParams(p=3.5, n=1))
    rho = b.extra["density_psi_R"]
    assert_allclose(recover_density(b.even_df, 0.6, 1.2).value, rho(0.6, 1.2), rtol=1e-10)
    assert_allclose(b.even_df(0.7, 0.4), b.reference_df(0.7, 0.4), rtol=1e-14)
    with pytest.raises(UnsupportedParameterError):
        FrickeParams(p=1.5, n=1)


def test_rotation_law():
    assert_allclose(mean_vphi_law(0, 2.0, 1.0, 1.0), 1.0)
    assert_allclose(mean_vphi_law(2, 1.0, 2.0, np.array([0.0, 2.0])), [0.0, 0.125])
    with pytest.raises(ValueError):
        mean_vphi_law(-1, 1.0, 1.0, 1.0)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_binney_odd_df_reproduces_rotation(n):
    b = binney_bundle(BinneyParams(q=0.9))
    odd = b.odd_df(n, 0.8, 1.5)
    for R, z in [(1.0, 0.0), (2.0, 1.0)]:
        got = recover_rotation(odd, b.potential(R, z), R).value
        assert_allclose(got, b.extra["rotation_target"](n, 0.8, 1.5, R, z), rtol=1e-9)


def test_binney_odd_labels():
    odd = binney_bundle(BinneyParams(q=0.9)).odd_df(1, 1.0, 1.0)
    labels = {c.label.split("[")[0] for c in odd.components}
    assert labels == {"T1", "T2", "T3", "T4", "T5", "T6", "T7"}
    assert list(components_by_label(odd, "T1"))


def test_builtin_parsing():
    assert parse_builtin("binney:v0=1,q=0.9") == ("binney", {"v0": 1.0, "q": 0.9})
    assert parse_builtin("LyndenBell") == ("lyndenbell", {})
    assert load_bundle("fricke:p=4,n=1").params == FrickeParams(4.0, 1)
    for bad, field in [("nope", "builtin"), ("binney:q", "builtin.q"), ("binney:q=x", "builtin.q"),
                       ("binney:w=1", "builtin.w"), ("fricke:n=1.5", "builtin.n")]:
        with pytest.raises(ModelSpecError) as exc:
            load_bundle(bad)
        assert exc.value.field == field
    with pytest.raises(ModelSpecError):
        BinneyParams(q=-1)
