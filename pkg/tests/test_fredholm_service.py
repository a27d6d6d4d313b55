import math

import numpy as np
import pytest

from app.exceptions import OutOfDiskError, UsageError
from app.schemas.bps import GrandPotentialModel
from app.services import fredholm_service, periods_service
from app.services.specfun_service import airy_ai
from tests.reference_values import P2_ENERGIES, Z1_EXACT, Z2_EXACT

TWO_PI = 2 * math.pi


@pytest.fixture(scope="module")
def airy_model(period_data):
    return fredholm_service.airy_coeff_table_p2(18, period_data)


def test_theta_frame(period_data):
    frame = fredholm_service.theta_frame_p2(3.0, period_data)
    assert frame.E == 3.0
    assert frame.tau.imag > 0
    assert math.isfinite(frame.prefactor_log)


def test_theta_frame_outside_disk(period_data):
    with pytest.raises(OutOfDiskError):
        fredholm_service.theta_frame_p2(1.0, period_data)


def test_closed_form_rejects_small_kappa(period_data):
    with pytest.raises(OutOfDiskError):
        fredholm_service.xi_closed_form_p2(2.0, pd=period_data)
    with pytest.raises(UsageError):
        fredholm_service.xi_closed_form_p2(-5.0, pd=period_data)


def test_determinant_changes_sign_at_ground_state(period_data):
    below = fredholm_service.xi_closed_form_p2(math.exp(P2_ENERGIES[0] - 0.05), pd=period_data)
    above = fredholm_service.xi_closed_form_p2(math.exp(P2_ENERGIES[0] + 0.05), pd=period_data)
    assert below * above < 0


def test_determinant_oscillates_on_negative_axis(period_data):
    values = [fredholm_service.xi_closed_form_p2(math.exp(E), pd=period_data) for E in np.linspace(2.0, 6.0, 81)]
    changes = sum(1 for a, b in zip(values, values[1:]) if a * b < 0)
    assert changes == 4


def test_determinant_growth_on_positive_axis(period_data):
    log_kappa = 20.0
    value = fredholm_service.xi_closed_form_p2(math.exp(log_kappa), negative=False, pd=period_data)
    assert math.log(value) / (3 / (8 * math.pi ** 2) * log_kappa ** 3) == pytest.approx(1.0, rel=0.02)


def test_determinant_is_positive_on_positive_axis(period_data):
    edge = fredholm_service.LARGE_RADIUS_EDGE + fredholm_service.ZERO_WINDOW_MARGIN
    for kappa in np.logspace(-2, 3, 11):
        if math.log(kappa) > edge:
            value = fredholm_service.xi_closed_form_p2(kappa, negative=False, pd=period_data)
        else:
            value = fredholm_service.fredholm_determinant_kernel(kappa)
        assert value > 0


def test_theta_route_matches_sheet_sum(period_data):
    kappa = math.exp(3.0)
    theta = fredholm_service.xi_closed_form_p2(kappa, pd=period_data)
    summed = fredholm_service.fredholm_determinant_sum(-kappa, period_data)
    assert theta == pytest.approx(summed, rel=1e-8)


def test_theta_route_matches_kernel_product(period_data):
    kappa = math.exp(3.0)
    theta = fredholm_service.xi_closed_form_p2(kappa, pd=period_data)
    assert fredholm_service.fredholm_determinant_kernel(-kappa) == pytest.approx(theta, rel=1e-5)


def test_sheet_sum_at_zero():
    assert fredholm_service.fredholm_determinant_sum(0.0) == 1.0


def test_sample_determinant_switches_route(period_data):
    samples = fredholm_service.sample_determinant([1.0, 50.0], period_data)
    assert [s.method for s in samples] == ["kernel", "theta"]
    with pytest.raises(UsageError):
        fredholm_service.sample_determinant([-1.0], period_data)


def test_zeros_reproduce_the_spectrum(period_data):
    zeros = fredholm_service.fredholm_zeros((2.0, 7.0), pd=period_data)
    assert zeros == pytest.approx(P2_ENERGIES, abs=1e-7)
    qc = [periods_service.qc_energy(n, period_data) for n in range(5)]
    assert zeros == pytest.approx(qc, abs=1e-10)


def test_zeros_below_ground_state(period_data):
    assert fredholm_service.fredholm_zeros((0.0, 1.0), pd=period_data) == []


def test_root_on_a_grid_point_is_reported_once():
    grid = [2.5, 3.0, 3.5, 4.0]
    assert fredholm_service.scan_roots(lambda E: E - 3.0, grid) == [3.0]
    assert fredholm_service.scan_roots(lambda E: E - 4.0, grid) == [4.0]
    assert fredholm_service.scan_roots(lambda E: (E - 2.5) * (E - 3.2), grid) == pytest.approx([2.5, 3.2])


def test_polish_outside_the_bracket_is_rejected():
    grid = [0.0, 1.0, 2.0]
    roots = fredholm_service.scan_roots(lambda E: E - 0.5, grid, polish=lambda rough: rough + 5.0)
    assert roots == pytest.approx([0.5], abs=1e-12)


def test_failed_polish_keeps_the_bracketed_root():
    def polish(rough):
        raise ValueError("no convergence")

    assert fredholm_service.scan_roots(lambda E: E - 1.5, [0.0, 1.0, 2.0], polish) == pytest.approx([1.5])


def test_zeros_range_order():
    with pytest.raises(UsageError):
        fredholm_service.fredholm_zeros((5.0, 2.0))


def test_airy_table_structure(period_data):
    model = fredholm_service.airy_coeff_table_p2(9, period_data)
    pairs = {(e.l, e.n) for e in model.instanton_coeffs}
    assert {l for l, _ in pairs} == {3, 6, 9}
    assert all(n <= 2 * l / 3 for l, n in pairs)
    assert {n for l, n in pairs if l == 3} <= {0, 1, 2}
    assert len(pairs) <= 15
    assert model.Ccoef == pytest.approx(9 / (8 * math.pi ** 2))
    assert model.Bcoef == pytest.approx(1 / 8)


def test_airy_table_cutoff():
    with pytest.raises(UsageError):
        fredholm_service.airy_coeff_table_p2(2)


def test_leading_airy_term():
    model = fredholm_service.airy_coeff_table_p2(3)
    bare = GrandPotentialModel(hbar=TWO_PI, A=model.A, Bcoef=model.Bcoef, Ccoef=model.Ccoef)
    c13 = model.Ccoef ** (1 / 3)
    expected = math.exp(model.A) / c13 * float(airy_ai((1 - model.Bcoef) / c13)[0])
    assert fredholm_service.z_trace_airy(1, bare) == pytest.approx(expected, rel=1e-12)


def test_first_trace_from_airy_sum(airy_model):
    assert fredholm_service.z_trace_airy(1, airy_model) == pytest.approx(Z1_EXACT, abs=1e-8)


def test_second_trace_from_airy_sum(airy_model):
    assert fredholm_service.z_trace_airy(2, airy_model) == pytest.approx(Z2_EXACT, abs=1e-8)
    assert Z2_EXACT == pytest.approx(0.0029707, abs=1e-7)


def test_airy_report(airy_model):
    report = fredholm_service.z_trace_airy_report(1, airy_model)
    assert report.method == "airy"
    assert report.error_estimate < 1e-8


def test_contour_needs_large_radius_anchor(period_data):
    with pytest.raises(OutOfDiskError):
        fredholm_service.z_trace_contour(1, mu0=1.0, pd=period_data)


@pytest.mark.slow
def test_first_trace_from_contour(period_data):
    assert fredholm_service.z_trace_contour(1, pd=period_data) == pytest.approx(Z1_EXACT, abs=1e-8)


@pytest.mark.slow
def test_contour_is_anchor_independent(period_data):
    one = fredholm_service.z_trace_contour(2, mu0=2.0, pd=period_data)
    other = fredholm_service.z_trace_contour(2, mu0=3.0, pd=period_data)
    assert one == pytest.approx(other, abs=1e-9)


@pytest.mark.slow
@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_airy_and_contour_routes_agree(N, airy_model, period_data):
    airy = fredholm_service.z_trace_airy(N, airy_model)
    contour = fredholm_service.z_trace_contour(N, pd=period_data)
    assert airy == pytest.approx(contour, abs=1e-8)


@pytest.mark.slow
def test_n32_scaling(airy_model):
    slope, _ = fredholm_service.n32_fit(range(4, 11), airy_model)
    assert slope == pytest.approx(4 * math.sqrt(2) * math.pi / 9, rel=0.05)
