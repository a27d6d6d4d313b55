import math

import pytest
from pydantic import ValidationError

from app.schemas.bps import AiryCoefficient, BPSTable, GrandPotentialModel, RefinedInvariant
from app.schemas.fredholm import ThetaFrame, TraceReport
from app.schemas.quantization import QuantizationConfig, SpectrumResult
from app.schemas.run import RunConfig, parse_hbar


@pytest.mark.parametrize("token,value", [
    ("2pi", 2 * math.pi),
    ("pi", math.pi),
    ("2pi/3", 2 * math.pi / 3),
    ("3*pi/2", 1.5 * math.pi),
    ("1.25", 1.25),
    (" 2 PI ", 2 * math.pi),
])
def test_parse_hbar(token, value):
    assert parse_hbar(token) == pytest.approx(value)


@pytest.mark.parametrize("token", ["0", "-1", "0pi", "pi/0", "tau", "inf"])
def test_parse_hbar_rejects(token):
    with pytest.raises(ValueError):
        parse_hbar(token)


def test_run_config_parses_token():
    config = RunConfig(subcommand="spectrum", hbar_token="2pi/3")
    assert config.hbar == pytest.approx(2 * math.pi / 3)
    assert config.output_format == "csv"


def test_run_config_rejects_unknown_format():
    with pytest.raises(ValidationError):
        RunConfig(subcommand="qc", output_format="xml")


def test_refined_invariant_is_strictly_integer():
    with pytest.raises(ValidationError):
        RefinedInvariant(degree=[1], two_jl=0, two_jr=2, value=1.0)


def _table(**overrides):
    data = dict(geometry="local_p2", version="t", bfield=[1], cubic="1/3", linear="1/12", linear_ns="-1/24")
    data.update(overrides)
    return data


def test_bps_table_parity():
    BPSTable(**_table(refined=[{"degree": [1], "two_jl": 0, "two_jr": 2, "value": 1}]))
    with pytest.raises(ValidationError):
        BPSTable(**_table(refined=[{"degree": [2], "two_jl": 0, "two_jr": 2, "value": 1}]))


def test_bps_table_zero_entries_skip_parity():
    BPSTable(**_table(refined=[{"degree": [2], "two_jl": 0, "two_jr": 2, "value": 0}]))


def test_bps_table_degree_rank():
    with pytest.raises(ValidationError):
        BPSTable(**_table(gv=[{"genus": 0, "degree": [1, 0], "value": 3}]))


def test_bps_table_rejects_float_constants():
    with pytest.raises(ValidationError):
        BPSTable(**_table(cubic=0.5))


def test_grand_potential_model_exponents():
    hbar = 2 * math.pi
    GrandPotentialModel(hbar=hbar, A=0.0, Bcoef=0.125, Ccoef=0.1, instanton_coeffs=[AiryCoefficient(l=3, n=2, value=1.0)])
    with pytest.raises(ValidationError):
        GrandPotentialModel(hbar=hbar, A=0.0, Bcoef=0.125, Ccoef=0.1,
                            instanton_coeffs=[AiryCoefficient(l=4, n=0, value=1.0)])


def test_grand_potential_model_generic_hbar_exponents():
    # 6 pi / hbar = 4: l = 3p + 4q
    model = GrandPotentialModel(hbar=1.5 * math.pi, A=0.0, Bcoef=0.0, Ccoef=0.1,
                                instanton_coeffs=[AiryCoefficient(l=7, n=0, value=1.0)])
    assert model.max_l == 7


def test_grand_potential_model_positive_c():
    with pytest.raises(ValidationError):
        GrandPotentialModel(hbar=1.0, A=0.0, Bcoef=0.0, Ccoef=0.0)


def test_theta_frame_upper_half_plane():
    ThetaFrame(E=3.0, xi=1.0, tau=-0.4 + 1.2j, prefactor_log=1.0)
    with pytest.raises(ValidationError):
        ThetaFrame(E=3.0, xi=1.0, tau=-0.5 - 0.1j, prefactor_log=1.0)


def test_trace_report_method():
    with pytest.raises(ValidationError):
        TraceReport(N=1, method="guess", value=0.1, error_estimate=0.0)


def test_spectrum_result_must_increase():
    cfg = QuantizationConfig(hbar=1.0)
    SpectrumResult(energies=[1.0, 2.0], errors=[0.0, 0.0], sizes=[20], method="oscillator", config=cfg)
    with pytest.raises(ValidationError):
        SpectrumResult(energies=[2.0, 1.0], errors=[0.0, 0.0], sizes=[20], method="oscillator", config=cfg)
    with pytest.raises(ValidationError):
        SpectrumResult(energies=[1.0], errors=[0.0, 0.0], sizes=[20], method="oscillator", config=cfg)


def test_spectrum_result_max_error():
    cfg = QuantizationConfig(hbar=1.0)
    result = SpectrumResult(energies=[1.0, 2.0], errors=[float("nan"), 1e-9], sizes=[20, 40],
                            method="oscillator", config=cfg)
    assert result.max_error == 1e-9


def test_quantization_precision():
    assert QuantizationConfig(hbar=1.0).working_precision == "auto"
    assert QuantizationConfig(hbar=1.0, working_precision=40).working_precision == 40
    with pytest.raises(ValidationError):
        QuantizationConfig(hbar=1.0, working_precision=8)
