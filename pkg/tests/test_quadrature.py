import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose
from scipy import integrate, special

from dfforge.coefficients import Atom, CoefficientFunction, exponential, power
from dfforge.config import configure, get_config
from dfforge.errors import DivergenceError
from dfforge.quadrature import abel_lower, abel_upper, gauss_jacobi

mp.mp.dps = 30


def qaws_lower(f, x, alpha, beta=0.0):
    # QUADPACK algebraic-logarithmic weight (psi - 0)**beta (x - psi)**(-alpha)
    val, _ = integrate.quad(f, 0, x, weight="alg", wvar=(beta, -alpha), epsabs=0.0, epsrel=1e-13, limit=200)
    return val


def mp_abel_lower(F, x, alpha):
    # w = (x - t)**(1 - alpha) removes the kernel singularity
    g = lambda t: sum(a.c * t**a.p * mp.exp(-a.k * t) for a in F.atoms)
    e = 1 / (1 - mp.mpf(alpha))
    f = lambda w: g(max(x - w**e, mp.mpf(0))) * e
    return float(mp.quad(f, [0, mp.mpf(x) ** (1 - mp.mpf(alpha))]))


@pytest.mark.parametrize("p", [0.0, 1.0, 2.5, 4.0])
@pytest.mark.parametrize("alpha", [0.0, 0.3, 0.5, 0.9])
def test_power_law_closed_form(p, alpha):
    x = 1.7
    want = x ** (p + 1 - alpha) * special.beta(p + 1, 1 - alpha)
    assert_allclose(abel_lower(power(p), x, alpha), want, rtol=1e-12)


@pytest.mark.parametrize("alpha", [0.1, 0.5, 0.75])
def test_mixed_atoms_against_mpmath_and_qaws(alpha):
    F = CoefficientFunction((Atom(1.0, 0.0, 1.3), Atom(-0.4, 1.5, 0.2), Atom(2.0, 3.0)))
    for x in (0.2, 1.0, 3.5):
        want = mp_abel_lower(F, x, alpha)
        assert_allclose(abel_lower(F, x, alpha), want, rtol=1e-11)
        assert_allclose(abel_lower(F, x, alpha), qaws_lower(F, x, alpha), rtol=1e-10)


@given(st.lists(st.tuples(st.floats(-2, 2).filter(lambda c: abs(c) > 1e-3), st.sampled_from([0.0, 1.0, 2.0, 0.5, 1.5]),
                          st.floats(0, 3)), min_size=1, max_size=3),
       st.floats(0.0, 0.95), st.floats(0.05, 4.0))
def test_random_atoms_against_qaws(triples, alpha, x):
    F = CoefficientFunction.from_triples(triples)
    want = qaws_lower(lambda t: F(t), x, alpha)
    scale = sum(abs(c) for c, _, _ in triples) * (1 + x) ** 3
    assert_allclose(abel_lower(F, x, alpha), want, rtol=1e-9, atol=1e-12 * scale)


def test_plain_callable_with_origin_exponent():
    f = lambda t: np.cos(t)
    want = qaws_lower(np.cos, 2.0, 0.4, beta=0.5)
    assert_allclose(abel_lower(f, 2.0, 0.4, beta=0.5), want, rtol=1e-11)


def test_linearity_and_vector_input():
    F, G = exponential(1.0, 2.0), power(2.0, -0.5)
    x = np.array([0.3, 1.0, 2.5])
    lhs = abel_lower(F + G * 3.0, x, 0.5)
    rhs = abel_lower(F, x, 0.5) + 3.0 * abel_lower(G, x, 0.5)
    assert lhs.shape == x.shape
    assert_allclose(lhs, rhs, rtol=1e-13)


@pytest.mark.parametrize("k", [0.5, 1.0, 4.0])
@pytest.mark.parametrize("alpha", [0.0, 0.5, 0.8])
def test_upper_exponential_oracle(k, alpha):
    x = np.array([0.0, 0.7, 3.0])
    want = np.exp(-k * x) * math.gamma(1 - alpha) * k ** (alpha - 1)
    assert_allclose(abel_upper(exponential(k), x, alpha), want, rtol=1e-11)


def test_upper_power_times_exponential_against_mpmath():
    F = CoefficientFunction((Atom(1.0, 2.0, 1.5), Atom(0.3, 0.0, 0.25)))
    x, alpha = 0.9, 0.35
    f = lambda t: (t**2 * mp.exp(-1.5 * t) + 0.3 * mp.exp(-0.25 * t)) * (t - x) ** (-alpha)
    assert_allclose(abel_upper(F, x, alpha), float(mp.quad(f, [x, x + 1, mp.inf])), rtol=1e-11)


def test_non_decaying_integrand_diverges():
    with pytest.raises(DivergenceError):
        abel_upper(power(0.0), 1.0, 0.5)
    with pytest.raises(DivergenceError):
        abel_lower(power(-1.5), 1.0, 0.5)


def test_gauss_jacobi_moments():
    x, w = gauss_jacobi(20, -0.5, 0.0)
    # int_{-1}^{1} (1-t)^{-1/2} t^2 dt
    want = float(mp.quad(lambda t: (1 - t) ** -0.5 * t**2, [-1, 1]))
    assert_allclose(np.sum(w * x**2), want, rtol=1e-13)


def test_config_tolerance_is_scoped():
    base = get_config().tol
    with configure(tol=1e-6):
        assert get_config().tol == 1e-6
    assert get_config().tol == base


def test_environment_override(monkeypatch):
    import dfforge.config as cfg
    monkeypatch.setenv(cfg.ENV_QUAD_TOL, "1e-7")
    assert cfg._from_environment().tol == 1e-7
