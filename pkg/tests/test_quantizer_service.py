import math
import warnings

import mpmath
import numpy as np
import pytest
from pydantic import ValidationError

from app.exceptions import ConvergenceWarning, UsageError
from app.schemas.curve import OperatorTerm, ToricCurveSpec
from app.schemas.quantization import QuantizationConfig
from app.services import kernel_service, quantizer_service, toric_service
from tests.reference_values import P2_ENERGIES

TWO_PI = 2 * math.pi


def _mp_eigenvalues(A, dps):
    with mpmath.workdps(dps):
        return sorted(float(mpmath.re(e)) for e in mpmath.eighe(A, eigvals_only=True))


def test_config_validation():
    with pytest.raises(ValidationError):
        QuantizationConfig(hbar=0.0)
    with pytest.raises(ValidationError):
        QuantizationConfig(hbar=1.0, basis_size=10)
    with pytest.raises(ValidationError):
        QuantizationConfig(hbar=1.0, ladder=[40, 20])
    assert QuantizationConfig(hbar=1.0, basis_size=20, extrapolation_levels=3).sizes == [20, 40, 80]


def test_default_ladder():
    cfg = QuantizationConfig(hbar=TWO_PI)
    assert cfg.sizes == [200, 300, 400]
    assert cfg.working_precision == "auto"
    assert cfg.model_copy(update={"oscillator_scale": 1.0}).sizes == [200, 300, 400]
    assert QuantizationConfig(hbar=TWO_PI, ladder=[30, 45]).sizes == [30, 45]


def test_ground_state_element_of_exponential():
    cfg = QuantizationConfig(hbar=TWO_PI, oscillator_scale=1.3)
    element = quantizer_service.ho_matrix_element(OperatorTerm(r=1, s=0, coeff=1.0), 0, 0, cfg)
    assert element == pytest.approx(math.exp(1.3 ** 2 / 4), rel=1e-14)


def test_constant_term_is_a_multiple_of_identity():
    cfg = QuantizationConfig(hbar=TWO_PI)
    term = OperatorTerm(r=0, s=0, coeff=2.5)
    assert quantizer_service.ho_matrix_element(term, 4, 4, cfg) == 2.5
    assert quantizer_service.ho_matrix_element(term, 4, 6, cfg) == 0


def test_matrix_element_hermiticity():
    cfg = QuantizationConfig(hbar=TWO_PI)
    term = OperatorTerm(r=-1, s=-1, coeff=1.0)
    a = quantizer_service.ho_matrix_element(term, 3, 7, cfg)
    b = quantizer_service.ho_matrix_element(term, 7, 3, cfg)
    assert a == pytest.approx(b.conjugate(), rel=1e-12)


def test_diagonal_bounded_by_classical_minimum():
    cfg = QuantizationConfig(hbar=TWO_PI, working_precision="double")
    A = quantizer_service.build_truncated_matrix(toric_service.preset("p2"), cfg, size=20)
    assert np.all(np.diag(A).real >= 3.0)
    assert np.allclose(A, A.conj().T, rtol=0, atol=0)


def test_truncations_are_nested():
    cfg = QuantizationConfig(hbar=TWO_PI, working_precision="double")
    spec = toric_service.preset("f1")
    small = quantizer_service.build_truncated_matrix(spec, cfg, size=20)
    large = quantizer_service.build_truncated_matrix(spec, cfg, size=40)
    assert np.allclose(large[:20, :20], small, rtol=1e-12, atol=0)


def test_rayleigh_ritz_monotonicity():
    cfg = QuantizationConfig(hbar=TWO_PI, working_precision=40)
    spec = toric_service.preset("p2")
    small = _mp_eigenvalues(quantizer_service.build_truncated_matrix(spec, cfg, size=20), 40)
    large = _mp_eigenvalues(quantizer_service.build_truncated_matrix(spec, cfg, size=40), 40)
    for n in range(5):
        assert large[n] <= small[n] * (1 + 1e-12)


@pytest.mark.parametrize("name", ["p2", "f0", "f1", "f2", "b2", "b3"])
def test_ground_state_above_classical_minimum(name):
    spec = toric_service.preset(name)
    cfg = QuantizationConfig(hbar=TWO_PI, working_precision="double")
    A = quantizer_service.build_truncated_matrix(spec, cfg, size=20)
    lowest = np.linalg.eigvalsh(A)[0]
    assert lowest > toric_service.curve_minimum(spec)[0]


def test_richardson_removes_leading_correction():
    sizes = [10, 20, 40]
    values = [1.0 + 3.0 / m + 5.0 / m ** 2 for m in sizes]
    value, error = quantizer_service.richardson(sizes, values)
    assert value == pytest.approx(1.0, abs=1e-10)
    assert error < 1e-2


def test_working_digits():
    spec = toric_service.preset("f0")
    cfg = QuantizationConfig(hbar=TWO_PI, oscillator_scale=math.sqrt(TWO_PI))
    assert quantizer_service.working_digits(spec, cfg, 3) == "double"
    digits = quantizer_service.working_digits(spec, cfg, 400)
    assert isinstance(digits, int)
    assert digits >= 16 + quantizer_service.DOUBLE_DIGIT_BUDGET
    assert digits > quantizer_service.working_digits(spec, cfg, 200)
    fixed = cfg.model_copy(update={"working_precision": "double"})
    assert quantizer_service.working_digits(spec, fixed, 400) == "double"


def test_auto_precision_switches_to_mpmath():
    spec = toric_service.preset("f0")
    cfg = QuantizationConfig(hbar=TWO_PI, oscillator_scale=math.sqrt(TWO_PI))
    assert isinstance(quantizer_service.build_truncated_matrix(spec, cfg, size=3), np.ndarray)
    assert isinstance(quantizer_service.build_truncated_matrix(spec, cfg, size=60), mpmath.matrix)


def test_unsettled_levels_warn():
    spec = toric_service.preset("f0")
    cfg = QuantizationConfig(hbar=TWO_PI, oscillator_scale=math.sqrt(TWO_PI), ladder=[20, 30],
                             working_precision="double", method="oscillator")
    with pytest.warns(ConvergenceWarning) as record:
        result = quantizer_service.spectrum(spec, cfg, levels=1)
    assert result.errors[0] > cfg.tolerance
    partial = [w.message.partial for w in record if isinstance(w.message, ConvergenceWarning)]
    assert partial == [pytest.approx(result.energies[0])]


def test_settled_levels_do_not_warn():
    spec = toric_service.preset("f0")
    cfg = QuantizationConfig(hbar=TWO_PI, oscillator_scale=math.sqrt(TWO_PI), ladder=[20, 30],
                             working_precision="double", tolerance=1.0, method="oscillator")
    with warnings.catch_warnings():
        warnings.simplefilter("error", ConvergenceWarning)
        quantizer_service.spectrum(spec, cfg, levels=1)


def test_three_term_reduction():
    assert kernel_service.three_term_reduction(toric_service.preset("p2")) == (1.0, 1.0, 0.0)
    spec = ToricCurveSpec(name="scaled", vertices=[(1, 0), (0, 1), (-2, -1)], coefficients=[1.0, 1.0, math.e])
    m, n, shift = kernel_service.three_term_reduction(spec)
    assert (m, n) == (2.0, 1.0)
    assert shift == pytest.approx(0.25)
    assert kernel_service.three_term_reduction(toric_service.preset("f0")) is None


def test_kernel_method_needs_three_terms():
    with pytest.raises(UsageError):
        quantizer_service.spectrum(toric_service.preset("f0"), QuantizationConfig(hbar=TWO_PI, method="kernel"))


def test_parity_sector_needs_symmetric_curve():
    with pytest.raises(UsageError):
        quantizer_service.parity_sector_spectrum(toric_service.preset("p2"), QuantizationConfig(hbar=TWO_PI), 0)


def test_parity_sectors_merge_to_full_spectrum():
    spec = toric_service.preset("f0")
    cfg = QuantizationConfig(hbar=TWO_PI, oscillator_scale=math.sqrt(TWO_PI), ladder=[20],
                             working_precision=30, method="oscillator")
    full = quantizer_service.spectrum(spec, cfg, levels=4).energies
    even = quantizer_service.parity_sector_spectrum(spec, cfg, 0, levels=4).energies
    odd = quantizer_service.parity_sector_spectrum(spec, cfg, 1, levels=4).energies
    assert sorted(even + odd)[:4] == pytest.approx(full, abs=1e-12)


@pytest.mark.slow
def test_local_p2_spectrum():
    result = quantizer_service.spectrum(toric_service.preset("p2"), QuantizationConfig(hbar=TWO_PI), levels=5)
    assert result.method == "kernel"
    assert result.energies == pytest.approx(P2_ENERGIES, abs=1e-7)


@pytest.mark.slow
def test_local_p2_high_level_follows_tropical_estimate():
    result = quantizer_service.spectrum(toric_service.preset("p2"), QuantizationConfig(hbar=TWO_PI), levels=21)
    estimate = (2 / 3) * math.sqrt(math.pi * TWO_PI) * math.sqrt(20)
    assert result.energies[20] == pytest.approx(estimate, rel=0.1)


@pytest.mark.slow
def test_oscillator_route_is_scale_independent():
    spec = toric_service.preset("p2")
    sigma = quantizer_service.optimal_oscillator_scale(spec, TWO_PI)
    energies = []
    for scale in (sigma, 1.2 * sigma):
        cfg = QuantizationConfig(hbar=TWO_PI, oscillator_scale=scale, ladder=[30, 45],
                                 working_precision=40, method="oscillator")
        energies.append(quantizer_service.spectrum(spec, cfg, levels=1).energies[0])
    assert energies[0] == pytest.approx(energies[1], abs=1e-3)
    assert energies[0] == pytest.approx(P2_ENERGIES[0], abs=1e-3)
