import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from app.exceptions import DomainError
from app.schemas.kernel import QdilogParams
from app.services.specfun_service import (
    airy_ai,
    airy_ai_derivative,
    bloch_wigner,
    digamma,
    digamma_difference,
    faddeev_phi,
    jacobi_theta2,
    jacobi_theta3,
    psi_ac,
)


def test_airy_at_zero():
    ai, _ = airy_ai(0.0)
    assert float(ai) == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), abs=1e-12)
    assert float(ai) == pytest.approx(0.3550280539, abs=1e-10)


def test_airy_at_one():
    assert float(airy_ai(1.0)[0]) == pytest.approx(0.1352924163, abs=1e-10)


def test_airy_decays_on_positive_axis():
    assert airy_ai(5.0)[0] < airy_ai(1.0)[0]


def test_airy_ode_residual():
    rng = np.random.default_rng(7)
    with mpmath.workdps(30):
        h = mpmath.mpf("1e-4")
        for x in rng.uniform(-5, 10, 100):
            x = mpmath.mpf(float(x))
            ai = [airy_ai(x + k * h)[0] for k in (-1, 0, 1)]
            second = (ai[0] - 2 * ai[1] + ai[2]) / h ** 2
            assert abs(float(second - x * ai[1])) <= 1e-8


def test_airy_derivative_recursion():
    x = 0.7
    ai, aip = airy_ai(x)
    assert float(airy_ai_derivative(x, 0)) == pytest.approx(float(ai))
    assert float(airy_ai_derivative(x, 1)) == pytest.approx(float(aip))
    assert float(airy_ai_derivative(x, 2)) == pytest.approx(x * float(ai))
    # Ai''' = Ai + x Ai'
    assert float(airy_ai_derivative(x, 3)) == pytest.approx(float(ai) + x * float(aip))


def test_digamma_values():
    assert float(digamma(1.0)) == pytest.approx(-0.5772156649, abs=1e-10)
    assert float(digamma(3.0) - digamma(2.0)) == pytest.approx(0.5, abs=1e-12)


def test_digamma_rejects_non_positive():
    with pytest.raises(DomainError):
        digamma(0.0)


def test_digamma_difference_is_exact():
    assert digamma_difference(6, 1) == Fraction(137, 60)
    assert digamma_difference(3, 2) == Fraction(1, 2)
    assert digamma_difference(2, 3) == Fraction(-1, 2)


def test_bloch_wigner_vanishes_on_unit_interval():
    assert bloch_wigner(0.3) == pytest.approx(0.0, abs=1e-14)


def test_bloch_wigner_antisymmetry():
    z = 0.3 + 0.4j
    assert bloch_wigner(z.conjugate()) == pytest.approx(-bloch_wigner(z), abs=1e-12)


def test_bloch_wigner_at_sixth_root_of_unity():
    assert bloch_wigner(cmath.exp(1j * math.pi / 3)) == pytest.approx(1.0149416064, abs=1e-10)


def test_bloch_wigner_inversion():
    rng = np.random.default_rng(3)
    for _ in range(20):
        z = complex(rng.uniform(-3, 3), rng.uniform(0.1, 3) * rng.choice([-1, 1]))
        assert bloch_wigner(z) + bloch_wigner(1 / z) == pytest.approx(0.0, abs=1e-10)


def test_bloch_wigner_singular_points():
    for z in (0, 1):
        with pytest.raises(DomainError):
            bloch_wigner(z)


def test_theta2_zero_at_half():
    assert abs(complex(jacobi_theta2(0.5, 0.3 + 1.2j))) < 1e-14


def test_theta2_even_and_antiperiodic():
    z, tau = 0.17 + 0.05j, 0.2 + 0.9j
    assert complex(jacobi_theta2(-z, tau)) == pytest.approx(complex(jacobi_theta2(z, tau)), abs=1e-14)
    assert complex(jacobi_theta2(z + 1, tau)) == pytest.approx(-complex(jacobi_theta2(z, tau)), abs=1e-14)


def test_theta2_value():
    assert complex(jacobi_theta2(0, 1j)).real == pytest.approx(0.9135791382, abs=1e-10)


def test_theta_rejects_lower_half_plane():
    with pytest.raises(DomainError):
        jacobi_theta2(0.1, -1j)
    with pytest.raises(DomainError):
        jacobi_theta3(0.1, 0.5)


def test_theta3_periodic():
    z, tau = 0.31, 0.1 + 0.7j
    assert complex(jacobi_theta3(z + 1, tau)) == pytest.approx(complex(jacobi_theta3(z, tau)), abs=1e-14)


@pytest.mark.parametrize("x", [0.0, 0.5, 1.3])
def test_faddeev_unitarity(x):
    assert abs(faddeev_phi(x, QdilogParams(b=1.0))) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("b", [0.7, 1.0, 1.3])
def test_faddeev_shift_equation(b):
    p = QdilogParams(b=b)
    z = 0.2
    lhs = faddeev_phi(z - 0.5j * b, p)
    rhs = faddeev_phi(z + 0.5j * b, p) * (1 + cmath.exp(2 * math.pi * b * z))
    assert abs(lhs - rhs) <= 1e-8 * abs(lhs)


def test_faddeev_inversion_constant():
    p = QdilogParams(b=1.0)

    def inversion(z):
        return faddeev_phi(-z, p) * faddeev_phi(z, p) * cmath.exp(-1j * math.pi * z * z)

    assert abs(inversion(0.1) - inversion(0.4)) < 1e-8


def test_faddeev_outside_strip():
    with pytest.raises(DomainError):
        faddeev_phi(0.3 + 1.5j, QdilogParams(b=1.0))


def test_psi_at_origin():
    p = QdilogParams(b=1.0)
    a = c = 1.0 / 6.0
    assert psi_ac(0.0, a, c, p) == pytest.approx(1 / faddeev_phi(-1j * (a + c), p), rel=1e-10)


def test_psi_decays_on_the_left():
    p = QdilogParams(b=1.0)
    values = [abs(psi_ac(x, 1 / 6, 1 / 6, p)) ** 2 for x in (-5.0, -6.0, -7.0, -8.0)]
    assert all(b < a for a, b in zip(values, values[1:]))
