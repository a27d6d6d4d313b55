"""
Periods Service

Large-radius periods of local P^2 and the quantities built from them.

The Picard-Fuchs operator theta^3 - 3 z (3 theta + 2)(3 theta + 1) theta has the
solutions 1, varpi_1 = log z + a(z), varpi_2 = log^2 z + 2 a(z) log z + b(z),
where a = varpi1_tilde and b = varpi2_tilde have exact rational coefficients.
With t = -varpi_1 (so Q = e^{-t} = z e^{a}) and dF_0/dt = varpi_2 / 6 one gets

    F_0 = t^3/18 + F_0^inst,   dF_0^inst/dt = (b - a^2)/6,

and d/dt = -theta / (1 + theta a) turns every t-derivative into a z-series.

Functions:
- periods: PeriodData at order J (cached)
- log_periods: varpi_1, varpi_2 as LogSeries
- pf_residual: Picard-Fuchs operator applied to a period
- xi_of_E: the function xi(E) of the exact quantization condition at hbar = 2 pi
- qc_energy: root of xi(E) - 1/4 = n + 1/2
- mirror_map_inverse: z as a series in Q
- instanton_z_series: F_0^inst and its first two t-derivatives as z-series
- f0_series: FreeEnergyData (F_0^inst in Q and z, genus-one evaluators)
- genus_one: F_1 and F_1^NS at a point z
- genus_one_z_series / genus_one_series: instanton parts of F_1, F_1^NS in z and in Q
- conifold_t: t at the conifold point, from the series and from Bloch-Wigner
- conifold_slope: (m+n+1)/(2 pi^2) D(-q^{m+1} chi_m) for the three-term family
"""

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional, Tuple

import mpmath
from scipy.optimize import bisect

from app.config import get_settings
from app.exceptions import ConifoldSingularityError, DomainError, OutOfDiskError, PrecisionError, UsageError
from app.schemas.periods import ConifoldValue, FreeEnergyData, PeriodData
from app.services.series_service import (
    LogSeries,
    TruncatedSeries,
    constant,
    log_series,
    ls_add,
    ls_scale,
    ls_theta_power,
    ls_times_variable,
    ps_compose,
    ps_eval,
    ps_exp,
    ps_integrate_theta,
    ps_log,
    ps_mul,
    ps_reciprocal,
    ps_revert,
    ps_theta,
    variable,
)
from app.services.specfun_service import bloch_wigner, digamma_difference

logger = logging.getLogger(__name__)

RADIUS = 1.0 / 27.0


def _workdps():
    return mpmath.workdps(get_settings().mp_dps)


def varpi1_coefficient(j: int) -> Fraction:
    """3 (3j-1)! / (j!)^3 (-1)^j."""
    return Fraction(3 * math.factorial(3 * j - 1), math.factorial(j) ** 3) * (-1) ** j


def varpi2_coefficient(j: int) -> Fraction:
    """18 (3j-1)! / (j!)^3 (psi(3j) - psi(j+1)) (-1)^j, exact."""
    return 6 * varpi1_coefficient(j) * digamma_difference(3 * j, j + 1)


@lru_cache(maxsize=8)
def periods(J: Optional[int] = None) -> PeriodData:
    """
    Series parts of the periods to order J.

    Args:
        J: Truncation order (defaults to the configured series order)

    Returns:
        PeriodData with exact rational coefficients

    Example:
        periods(3).varpi1_tilde.coeffs == (0, -6, 45, -560)
    """
    J = J or get_settings().series_order
    if J < 1:
        raise UsageError("series order must be at least 1")
    a = TruncatedSeries((Fraction(0),) + tuple(varpi1_coefficient(j) for j in range(1, J + 1)))
    b = TruncatedSeries((Fraction(0),) + tuple(varpi2_coefficient(j) for j in range(1, J + 1)))
    logger.debug("periods built to order %d", J)
    return PeriodData(varpi1_tilde=a, varpi2_tilde=b, order=J)


def log_periods(pd: PeriodData) -> Tuple[LogSeries, LogSeries]:
    a, b = pd.varpi1_tilde, pd.varpi2_tilde
    one = constant(1, pd.order)
    varpi1 = log_series([a, one])
    varpi2 = log_series([b, a * 2, one])
    return varpi1, varpi2


def pf_residual(pd: PeriodData, which: int = 1) -> LogSeries:
    """
    (theta^3 - 3 z (3 theta + 2)(3 theta + 1) theta) applied to varpi_1 or varpi_2.

    Every sector of the result vanishes through the truncation order.
    """
    if which not in (1, 2):
        raise UsageError("which must be 1 or 2")
    period = log_periods(pd)[which - 1]
    t1 = ls_theta_power(period, 1)
    t2 = ls_theta_power(period, 2)
    t3 = ls_theta_power(period, 3)
    # (3 theta + 2)(3 theta + 1) theta = 9 theta^3 + 9 theta^2 + 2 theta
    inner = ls_add(ls_add(ls_scale(t3, 9), ls_scale(t2, 9)), ls_scale(t1, 2))
    return ls_add(t3, ls_scale(ls_times_variable(inner), -3))


def _check_disk(z) -> None:
    if abs(float(z)) >= RADIUS:
        raise OutOfDiskError(f"|z| = {float(abs(z)):.6g} is outside the disk |z| < 1/27")


def _xi_mp(E, pd: PeriodData):
    z = mpmath.exp(-3 * mpmath.mpf(E))
    _check_disk(z)
    L = -3 * mpmath.mpf(E)
    a = ps_eval(pd.varpi1_tilde, z)
    b = ps_eval(pd.varpi2_tilde, z)
    ta = ps_eval(ps_theta(pd.varpi1_tilde), z)
    tb = ps_eval(ps_theta(pd.varpi2_tilde), z)
    w1 = L + a
    w2 = L ** 2 + 2 * a * L + b
    tw1 = 1 + ta
    tw2 = 2 * L * (1 + ta) + 2 * a + tb
    return (w1 * tw2 - w2 * tw1) / (8 * mpmath.pi ** 2 * tw1)


def xi_of_E(E: float, pd: Optional[PeriodData] = None) -> float:
    """
    xi(E) = (varpi_1 varpi_2' - varpi_2 varpi_1') / (8 pi^2 varpi_1'), z = e^{-3E}.

    Args:
        E: Energy, E > log(27)/3
        pd: Period data (default order when omitted)

    Raises:
        OutOfDiskError: If |z| >= 1/27
    """
    pd = pd or periods()
    with _workdps():
        return float(_xi_mp(E, pd))


def xi_large_E(E: float) -> float:
    """Leading behaviour 9 E^2 / (8 pi^2)."""
    return 9 * E ** 2 / (8 * math.pi ** 2)


def qc_energy(n: int, pd: Optional[PeriodData] = None) -> float:
    """
    Energy of level n from xi(E) - 1/4 = n + 1/2 (bisection, then secant-Newton polish).

    Examples:
        n=0 -> 2.56264206862...
        n=4 -> 6.45535922844...
    """
    if n < 0:
        raise UsageError("level index must be non-negative")
    pd = pd or periods()
    target = n + 0.75
    lo = math.log(27) / 3 + 0.1
    if xi_of_E(lo, pd) > target:
        raise DomainError(f"level {n} lies below the large-radius disk")
    hi = max(lo + 1.0, math.sqrt(8 * math.pi ** 2 * target / 9) + 1.0)
    while xi_of_E(hi, pd) < target:
        hi += 1.0
    rough = bisect(lambda e: xi_of_E(e, pd) - target, lo, hi, xtol=1e-8)
    with _workdps():
        root = mpmath.findroot(lambda e: _xi_mp(e, pd) - target, mpmath.mpf(rough))
    return float(root)


def mirror_map_inverse(J: int, pd: Optional[PeriodData] = None) -> TruncatedSeries:
    """
    z(Q) = Q + 6 Q^2 + ..., the reversion of Q(z) = z e^{varpi1_tilde(z)}.

    Raises:
        UsageError: If J exceeds the period order
    """
    pd = pd or periods(J)
    if J > pd.order:
        raise UsageError(f"order {J} exceeds the period order {pd.order}")
    a = pd.varpi1_tilde.truncate(J)
    Qz = ps_mul(variable(J), ps_exp(a))
    return ps_revert(Qz, label="Q")


@lru_cache(maxsize=8)
def _instanton_z_series_cached(pd: PeriodData) -> Dict[str, TruncatedSeries]:
    a, b = pd.varpi1_tilde, pd.varpi2_tilde
    one_plus_theta_a = 1 + ps_theta(a)
    g = (b - ps_mul(a, a)) / 6
    f0 = ps_integrate_theta(-ps_mul(g, one_plus_theta_a))
    f2 = -ps_mul(ps_theta(g), ps_reciprocal(one_plus_theta_a))
    return {"a": a, "b": b, "one_plus_theta_a": one_plus_theta_a, "f0": f0, "f1": g, "f2": f2}


def instanton_z_series(pd: Optional[PeriodData] = None) -> Dict[str, TruncatedSeries]:
    """
    z-series of F_0^inst (f0), dF_0^inst/dt (f1) and d^2F_0^inst/dt^2 (f2).

    Also returns a = varpi1_tilde, b = varpi2_tilde and 1 + theta a.
    """
    return _instanton_z_series_cached(pd or periods())


def _genus_one_mp(z, pd: PeriodData):
    if 1 + 27 * z <= 0:
        raise ConifoldSingularityError(f"genus one is singular for 1 + 27 z <= 0 (z = {float(z):.6g})")
    _check_disk(z)
    if z == 0:
        raise DomainError("genus one is evaluated at z != 0")
    one_plus = ps_eval(1 + ps_theta(pd.varpi1_tilde), z)
    # -dz/dt = z / (1 + theta a); for z < 0 the real part of the logarithms is kept
    log_abs_z = mpmath.log(abs(z))
    f1 = (0.5 * (log_abs_z - mpmath.log(abs(one_plus)))
          - (7 * log_abs_z + mpmath.log(1 + 27 * z)) / 12)
    f1ns = -(mpmath.log(1 + 27 * z) - log_abs_z) / 24
    return f1, f1ns


def genus_one(z: float, pd: Optional[PeriodData] = None) -> Tuple[float, float]:
    """
    F_1 = (1/2) log(-dz/dt) - (1/12) log(z^7 (1 + 27 z)),  F_1^NS = -(1/24) log((1 + 27 z)/z).

    Args:
        z: Point with -1/27 < z < 1/27, z != 0
        pd: Period data for dt/dz = -varpi_1'(z)

    Returns:
        (F1, F1NS)

    Raises:
        ConifoldSingularityError: If 1 + 27 z <= 0
    """
    pd = pd or periods()
    with _workdps():
        f1, f1ns = _genus_one_mp(mpmath.mpf(z), pd)
        return float(f1), float(f1ns)


@lru_cache(maxsize=8)
def _genus_one_z_series_cached(pd: PeriodData) -> Dict[str, TruncatedSeries]:
    a = pd.varpi1_tilde
    log_conifold = ps_log(1 + 27 * variable(pd.order))
    h1 = a / 12 - ps_log(1 + ps_theta(a)) / 2 - log_conifold / 12
    h2 = -a / 24 - log_conifold / 24
    return {"h1": h1, "h2": h2}


def genus_one_z_series(pd: Optional[PeriodData] = None) -> Dict[str, TruncatedSeries]:
    """
    Instanton parts of the genus-one free energies as z-series.

    F_1 = t/12 + h1(z) and F_1^NS = -t/24 + h2(z), with t = -log z - varpi1_tilde(z).
    """
    return _genus_one_z_series_cached(pd or periods())


def genus_one_series(J: int, pd: Optional[PeriodData] = None) -> Tuple[TruncatedSeries, TruncatedSeries]:
    """F_1 - t/12 and F_1^NS + t/24 as series in Q = e^{-t}."""
    pd = pd or periods(J)
    h = genus_one_z_series(pd)
    zQ = mirror_map_inverse(J, pd)
    return ps_compose(h["h1"].truncate(J), zQ), ps_compose(h["h2"].truncate(J), zQ)


def f0_series(J: int, pd: Optional[PeriodData] = None) -> FreeEnergyData:
    """
    Genus-zero instanton series F_0 - t^3/18 = 3 Q - 45/8 Q^2 + 244/9 Q^3 + ...

    dF_0/dt = varpi_2 / 6 is integrated term by term with zero constant term;
    the z-series is then composed with z(Q).
    """
    if J < 3:
        raise UsageError("f0_series needs J >= 3")
    pd = pd or periods(J)
    if J > pd.order:
        raise UsageError(f"order {J} exceeds the period order {pd.order}")
    inst = instanton_z_series(pd)
    f0_z = inst["f0"].truncate(J)
    f0_Q = ps_compose(f0_z, mirror_map_inverse(J, pd))
    return FreeEnergyData(
        F0_instanton=f0_Q,
        F0_instanton_z=f0_z,
        F1_of_z=lambda z: genus_one(z, pd)[0],
        F1NS_of_z=lambda z: genus_one(z, pd)[1],
    )


def conifold_t() -> ConifoldValue:
    """
    t_c = -log(1/27) - varpi1_tilde(-1/27) (the +-i pi of the log dropped), and (9/pi) D(e^{i pi/3}).

    The series at z = -1/27 has positive terms ~ j^{-3/2}; it is summed with
    Euler-Maclaurin acceleration (mpmath.nsum).

    Raises:
        PrecisionError: If the accelerated sum does not reach 1e-8
    """
    with _workdps():
        def term(j):
            return 3 * mpmath.gamma(3 * j) / mpmath.gamma(j + 1) ** 3 / mpmath.mpf(27) ** j

        total, err = mpmath.nsum(term, [1, mpmath.inf], method="euler-maclaurin", error=True)
        value = mpmath.log(27) - total
        bw = 9 / mpmath.pi * bloch_wigner(mpmath.exp(1j * mpmath.pi / 3))
    if err > 1e-8:
        raise PrecisionError(f"conifold series did not converge (error {float(err):.3g})", partial=float(value))
    logger.debug("t_c: series %.15g, Bloch-Wigner %.15g", float(value), float(bw))
    return ConifoldValue(series_value=float(value), series_error=float(err), bloch_wigner_value=float(bw))


def conifold_slope(m: float, n: float) -> float:
    """
    (m + n + 1)/(2 pi^2) D(-q^{m+1} chi_m), q = e^{i pi/(m+n+1)}, chi_k = (q^k - q^-k)/(q - q^-1).

    For m = n = 1, -6 pi times this value is t_c.
    """
    with _workdps():
        q = mpmath.exp(1j * mpmath.pi / (m + n + 1))
        chi = (q ** m - q ** (-m)) / (q - 1 / q)
        return float((m + n + 1) / (2 * mpmath.pi ** 2) * bloch_wigner(-q ** (m + 1) * chi))
