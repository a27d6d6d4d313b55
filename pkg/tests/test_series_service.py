from fractions import Fraction

import mpmath
import pytest

from app.exceptions import SingularReversionError, UsageError
from app.services.periods_service import periods
from app.services.series_service import (
    constant,
    log_series,
    ls_theta_power,
    ps_compose,
    ps_eval,
    ps_exp,
    ps_integrate_theta,
    ps_log,
    ps_log1p,
    ps_mul,
    ps_pow,
    ps_reciprocal,
    ps_revert,
    ps_theta,
    series,
    variable,
)


def test_mul_difference_of_squares():
    assert ps_mul(series([1, 1, 0]), series([1, -1, 0])) == series([1, 0, -1])


def test_mul_by_one_is_identity():
    a = series([1, 2, 3])
    assert ps_mul(a, constant(1, 2)) == a


def test_mul_truncates_to_order():
    a = series([0, -6, 45, 0])
    assert ps_mul(a, a).coeffs == (0, 0, 36, -540)


def test_mul_takes_smaller_order():
    assert ps_mul(series([1, 1, 1, 1]), series([1, 1])).order == 1


def test_mixed_labels_rejected():
    with pytest.raises(UsageError):
        ps_mul(variable(3, "z"), variable(3, "Q"))


def test_exact_coefficients_stay_fractions():
    product = ps_mul(series([Fraction(1, 3), 1]), series([3, Fraction(1, 2)]))
    assert all(isinstance(c, Fraction) for c in product.coeffs)
    assert product.coeffs == (1, Fraction(19, 6))


def test_exp_of_zero():
    assert ps_exp(constant(0, 4)) == constant(1, 4)


def test_exp_of_variable():
    assert ps_exp(variable(3)).coeffs == (1, 1, Fraction(1, 2), Fraction(1, 6))


def test_exp_of_scaled_variable():
    assert ps_exp(series([0, -6, 0])).coeffs == (1, -6, 18)


def test_exp_with_float_coefficients():
    out = ps_exp(series([0, mpmath.mpf("0.5"), 0, 0]))
    assert float(out[3]) == pytest.approx(0.125 / 6)


def test_exp_rejects_constant_term():
    with pytest.raises(UsageError):
        ps_exp(series([1, 1]))


def test_log_inverts_exp():
    a = series([0, 2, -1, 5, 3])
    assert ps_log(ps_exp(a)) == a


def test_log1p_of_variable():
    assert ps_log1p(variable(3)) == series([0, 1, Fraction(-1, 2), Fraction(1, 3)])
    with pytest.raises(UsageError):
        ps_log1p(series([1, 1]))


def test_reciprocal():
    assert ps_mul(series([1, -1, 0, 0]), ps_reciprocal(series([1, -1, 0, 0]))) == constant(1, 3)


def test_pow_matches_repeated_product():
    a = series([1, 2, 3, 4])
    assert ps_pow(a, 3) == ps_mul(a, ps_mul(a, a))
    assert ps_pow(a, 0) == constant(1, 3)


def test_revert_identity():
    assert ps_revert(variable(4), label="Q") == variable(4, "Q")


def test_revert_quadratic():
    assert ps_revert(series([0, 1, -1])).coeffs == (0, 1, 1)


def test_revert_local_p2_mirror_map():
    pd = periods(2)
    q_of_z = ps_mul(variable(2), ps_exp(pd.varpi1_tilde))
    assert ps_revert(q_of_z, label="Q").coeffs[:3] == (0, 1, 6)


def test_revert_is_a_compositional_inverse():
    a = series([0, 2, 3, -1, 4, 7])
    assert ps_compose(a, ps_revert(a)) == variable(5)


def test_revert_singular():
    with pytest.raises(SingularReversionError):
        ps_revert(series([0, 0, 1]))


def test_compose_needs_zero_constant_term():
    with pytest.raises(UsageError):
        ps_compose(series([1, 1]), series([1, 1]))


def test_theta_and_its_inverse():
    a = series([0, 3, 5, 7])
    assert ps_theta(a).coeffs == (0, 3, 10, 21)
    assert ps_integrate_theta(ps_theta(a)) == a


def test_eval_is_horner():
    assert float(ps_eval(series([1, 2, 3]), 0.5)) == pytest.approx(2.75, abs=1e-15)


def test_log_series_theta_acts_on_log():
    # theta(log z) = 1
    log_z = log_series([constant(0, 3), constant(1, 3)])
    assert ls_theta_power(log_z, 1).sector(0) == constant(1, 3)
    assert ls_theta_power(log_z, 2).sector(0) == constant(0, 3)
