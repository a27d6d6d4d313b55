import math
from fractions import Fraction

import numpy as np
import pytest

from app.exceptions import ConifoldSingularityError, OutOfDiskError, UsageError
from app.services import periods_service
from app.services.enumerative_service import gv_from_gw
from tests.reference_values import P2_ENERGIES


def test_varpi1_coefficients():
    assert periods_service.periods(3).varpi1_tilde.coeffs == (0, -6, 45, -560)


def test_varpi2_first_coefficient():
    assert periods_service.periods(3).varpi2_tilde[1] == -18


def test_coefficients_are_exact():
    pd = periods_service.periods(5)
    assert all(isinstance(c, Fraction) for c in pd.varpi2_tilde.coeffs)


def test_periods_rejects_zero_order():
    with pytest.raises(UsageError):
        periods_service.periods(0)


@pytest.mark.parametrize("which", [1, 2])
def test_picard_fuchs_annihilates_periods(which):
    residual = periods_service.pf_residual(periods_service.periods(12), which)
    for k in range(3):
        assert all(c == 0 for c in residual.sector(k).coeffs)


def test_xi_large_energy(period_data):
    E = 30.0
    assert periods_service.xi_of_E(E, period_data) * 8 * math.pi ** 2 / 9 / E ** 2 == pytest.approx(1.0, abs=1e-6)
    assert periods_service.xi_large_E(E) == pytest.approx(9 * E ** 2 / (8 * math.pi ** 2))


def test_xi_at_ground_state(period_data):
    assert periods_service.xi_of_E(P2_ENERGIES[0], period_data) - 0.25 == pytest.approx(0.5, abs=1e-9)


def test_xi_is_increasing(period_data):
    values = [periods_service.xi_of_E(E, period_data) for E in np.linspace(1.5, 8.0, 14)]
    assert all(b > a for a, b in zip(values, values[1:]))


def test_xi_outside_disk(period_data):
    with pytest.raises(OutOfDiskError):
        periods_service.xi_of_E(1.0, period_data)


@pytest.mark.parametrize("n", [0, 4])
def test_quantization_condition_energies(n, period_data):
    assert periods_service.qc_energy(n, period_data) == pytest.approx(P2_ENERGIES[n], abs=1e-10)


def test_quantization_condition_all_tabulated_levels(period_data):
    energies = [periods_service.qc_energy(n, period_data) for n in range(5)]
    assert energies == pytest.approx(P2_ENERGIES, abs=1e-10)


def test_qc_energy_rejects_negative_level():
    with pytest.raises(UsageError):
        periods_service.qc_energy(-1)


def test_mirror_map_inverse():
    zQ = periods_service.mirror_map_inverse(4)
    assert zQ.label == "Q"
    assert zQ.coeffs[:3] == (0, 1, 6)


def test_mirror_map_inverse_order_check():
    with pytest.raises(UsageError):
        periods_service.mirror_map_inverse(10, periods_service.periods(5))


def test_genus_zero_instanton_series():
    f0 = periods_service.f0_series(5).F0_instanton
    assert f0.coeffs[:4] == (0, 3, Fraction(-45, 8), Fraction(244, 9))


def test_genus_zero_gv_invariants_are_integers():
    f0 = periods_service.f0_series(6).F0_instanton
    gv = gv_from_gw(f0.coeffs[1:])
    assert all(n.denominator == 1 for n in gv)
    assert [int(n) for n in gv] == [3, -6, 27, -192, 1695, -17064]


def test_f0_series_needs_order_three():
    with pytest.raises(UsageError):
        periods_service.f0_series(2)


def test_ns_genus_one_near_large_radius(period_data):
    _, f1ns = periods_service.genus_one(1e-6, period_data)
    # -(1/24) log((1 + 27 z)/z) ~ (1/24) log z
    assert f1ns == pytest.approx(math.log(1e-6) / 24, abs=1e-3)
    assert f1ns == pytest.approx(-0.5756, abs=1e-3)


def test_genus_one_on_the_negative_axis(period_data):
    f1, f1ns = periods_service.genus_one(-0.01, period_data)
    assert math.isfinite(f1) and math.isfinite(f1ns)


def test_genus_one_past_conifold(period_data):
    with pytest.raises(ConifoldSingularityError):
        periods_service.genus_one(-0.04, period_data)


def test_genus_one_evaluators_on_free_energy_data():
    data = periods_service.f0_series(4)
    assert data.F1NS_of_z(1e-3) == pytest.approx(periods_service.genus_one(1e-3, periods_service.periods(4))[1])


def test_conifold_value():
    tc = periods_service.conifold_t()
    assert tc.series_value == pytest.approx(2.9075896851, abs=1e-8)
    assert tc.discrepancy <= 1e-6


def test_conifold_slope_of_local_p2():
    tc = periods_service.conifold_t()
    assert -6 * math.pi * periods_service.conifold_slope(1, 1) == pytest.approx(tc.bloch_wigner_value, rel=1e-10)
