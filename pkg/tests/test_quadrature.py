import math

import numpy as np
import pytest
from scipy.special import roots_legendre

from fwdsmile.exceptions import QuadratureError
from fwdsmile.quadrature import GAUSS_WEIGHTS, KRONROD_WEIGHTS, NODES, gk15, integrate


def test_rule_constants():
    assert KRONROD_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    assert GAUSS_WEIGHTS.sum() == pytest.approx(2.0, abs=1e-15)
    x, w = roots_legendre(7)
    assert np.allclose(np.sort(NODES[GAUSS_WEIGHTS > 0]), x, atol=1e-15)
    assert np.allclose(GAUSS_WEIGHTS[GAUSS_WEIGHTS > 0], w[np.argsort(x)], atol=1e-15)


@pytest.mark.parametrize("deg", range(0, 23))
def test_kronrod_exact_for_polynomials(deg):
    val, _ = gk15(lambda x: x**deg, -1.0, 1.0)
    exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
    assert val == pytest.approx(exact, abs=1e-14)


def test_integrate_smooth():
    r = integrate(np.exp, 0.0, 3.0, abs_tol=1e-14, rel_tol=1e-14)
    assert r.value == pytest.approx(math.expm1(3.0), rel=1e-14)
    assert r.error <= 1e-13


def test_integrate_oscillatory():
    k = 50.0
    r = integrate(lambda x: np.cos(k * x) * np.exp(-x), 0.0, 20.0, abs_tol=1e-13, rel_tol=1e-13)
    exact = (1 - math.exp(-20) * (math.cos(20 * k) - k * math.sin(20 * k))) / (1 + k * k)
    assert r.value == pytest.approx(exact, abs=1e-12)


def test_integrate_complex_takes_real_part():
    r = integrate(lambda x: np.exp(1j * x), 0.0, math.pi / 2)
    assert r.value == pytest.approx(1.0, abs=1e-12)


def test_subdivision_budget():
    with pytest.raises(QuadratureError):
        integrate(lambda x: np.abs(x - 0.3) ** -0.9, 0.0, 1.0, abs_tol=1e-14, rel_tol=1e-14,
                  max_subdivisions=20)


def test_deterministic():
    f = lambda x: np.sin(30 * x) / (1 + x * x)
    a = integrate(f, 0, 10, initial_panels=7)
    b = integrate(f, 0, 10, initial_panels=7)
    assert a == b
