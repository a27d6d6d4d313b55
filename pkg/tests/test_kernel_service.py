import math

import numpy as np
import pytest
from pydantic import ValidationError

from app.exceptions import UnsupportedOrderError, UnsupportedParametersError, UsageError
from app.schemas.kernel import KernelParams
from app.services import kernel_service
from tests.reference_values import P2_ENERGIES, TRACE_P2_THIRD, Z1_EXACT, Z2_EXACT


def test_kernel_params_at_two_pi(p2_kernel):
    assert p2_kernel.b == pytest.approx(math.sqrt(3))
    assert p2_kernel.a == pytest.approx(math.sqrt(3) / 6)
    assert p2_kernel.c == pytest.approx(math.sqrt(3) / 6)


def test_kernel_params_at_two_pi_over_three(p2_kernel_third):
    assert p2_kernel_third.b == pytest.approx(1.0)
    assert p2_kernel_third.a == pytest.approx(1 / 6)


def test_kernel_params_rejects_non_positive():
    with pytest.raises(UsageError):
        kernel_service.kernel_params(1, 0, 1.0)


def test_kernel_params_relations_are_checked():
    with pytest.raises(ValidationError):
        KernelParams(m=1, n=1, hbar=2 * math.pi, b=1.0, a=1 / 6, c=1 / 6)


def test_kernel_is_hermitian(p2_kernel):
    a = kernel_service.rho_kernel(0.3, -0.7, p2_kernel)
    b = kernel_service.rho_kernel(-0.7, 0.3, p2_kernel)
    assert a == pytest.approx(b.conjugate(), rel=1e-12)


def test_kernel_diagonal_is_positive(p2_kernel):
    for p in (-2.0, 0.0, 1.5):
        value = kernel_service.rho_kernel(p, p, p2_kernel)
        assert value.real > 0
        assert abs(value.imag) < 1e-14 * value.real


def test_diagonal_decays(p2_kernel):
    p0 = kernel_service.diagonal_decay_point(p2_kernel)
    assert 0 < p0 < 80
    assert abs(kernel_service.rho_kernel(p0 + 1, p0 + 1, p2_kernel)) < 1e-8


def test_nystrom_matrix_is_positive(p2_kernel):
    lam = kernel_service.kernel_grid(p2_kernel, 0.1).eigenvalues()
    assert lam[0] > 0
    assert lam[0] == pytest.approx(math.exp(-P2_ENERGIES[0]), rel=1e-4)


def test_closed_form_trace_at_two_pi_over_three():
    assert kernel_service.analytic_trace_p2_third() == pytest.approx(TRACE_P2_THIRD, abs=1e-13)


def test_trace_at_two_pi_over_three(p2_kernel_third):
    assert kernel_service.trace_power(1, p2_kernel_third) == pytest.approx(TRACE_P2_THIRD, abs=1e-8)


def test_trace_at_two_pi(p2_kernel):
    assert kernel_service.trace_power(1, p2_kernel) == pytest.approx(Z1_EXACT, abs=1e-6)


def test_second_fermionic_trace(p2_kernel):
    assert kernel_service.fermionic_trace(2, p2_kernel) == pytest.approx(Z2_EXACT, abs=1e-6)


def test_newton_identity(p2_kernel):
    t1 = kernel_service.trace_power(1, p2_kernel)
    t2 = kernel_service.trace_power(2, p2_kernel)
    assert kernel_service.fermionic_trace(2, p2_kernel) == pytest.approx((t1 ** 2 - t2) / 2, abs=1e-10)
    assert 0 < t2 < t1 ** 2


def test_third_trace_is_positive_and_smaller(p2_kernel):
    t2 = kernel_service.trace_power(2, p2_kernel)
    t3 = kernel_service.trace_power(3, p2_kernel)
    assert 0 < t3 < t2


def test_trace_report_carries_error(p2_kernel):
    report = kernel_service.trace_power_report(1, p2_kernel)
    assert report.quantity == "Tr rho^1"
    assert report.error < 1e-8


def test_unsupported_orders(p2_kernel):
    with pytest.raises(UnsupportedOrderError):
        kernel_service.trace_power(4, p2_kernel)
    with pytest.raises(UnsupportedOrderError):
        kernel_service.fermionic_trace(4, p2_kernel)
    with pytest.raises(UsageError):
        kernel_service.trace_power(0, p2_kernel)


def test_kernel_spectrum_levels_increase():
    energies, errors, sizes = kernel_service.kernel_spectrum(1, 1, 2 * math.pi, 3)
    assert energies == sorted(energies)
    assert len(errors) == 3 and sizes[0] > 0
    assert all(np.isfinite(errors))


def test_matrix_model_only_for_local_p2():
    with pytest.raises(UnsupportedParametersError):
        kernel_service.matrix_model_z(2, kernel_service.kernel_params(2, 1, 2 * math.pi))


def test_matrix_model_constant_closed_form():
    assert kernel_service.matrix_model_constant_closed_form(1, 1) == pytest.approx(1 / 6)


@pytest.mark.slow
def test_matrix_model_second_trace(p2_kernel):
    assert kernel_service.matrix_model_z(2, p2_kernel) == pytest.approx(Z2_EXACT, abs=1e-5)


@pytest.mark.slow
def test_matrix_model_reproduces_first_trace(p2_kernel):
    assert kernel_service.matrix_model_z(1, p2_kernel) == pytest.approx(Z1_EXACT, abs=1e-6)
