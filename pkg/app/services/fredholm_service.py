"""
Fredholm Service

String-side predictions for the spectral problem of local P^2 at hbar = 2 pi.

The Fredholm determinant is the periodic superposition of the grand potential,

    Xi(kappa) = sum_{n in Z} exp J(mu + 2 pi i n),   kappa = e^mu.

At hbar = 2 pi the sum collapses to a theta function. On the negative axis
kappa = -e^E (so z = e^{-3E}, t = 3E - varpi1_tilde(z) real)

    Xi(-e^E) = exp J(t) Re(e^{i pi/8} theta_2(xi - 1/4, tau)),
    xi = 3 (t F'' - F') / (4 pi^2),   tau = 9 i F'' / (2 pi) - 1/2,

and on the positive axis Xi(e^mu) = exp J theta_3(xi + 5/8, 9 i F'' / (2 pi)).
The zeros of theta_2 reproduce the exact quantization condition
xi(E) - 1/4 = n + 1/2.

The fermionic traces Z(N) are the Taylor coefficients of Xi; they are computed
from the large-mu Airy expansion of e^J and, independently, from the contour
integral of e^{J - N mu}.

Functions:
- theta_frame_p2: ThetaFrame at kappa = e^E
- xi_closed_form_p2: Xi(-kappa) (theta_2) or Xi(kappa) (theta_3)
- fredholm_determinant_sum: Xi(kappa) from the sum over sheets
- fredholm_determinant_kernel: Xi(kappa) = prod (1 + kappa lambda) from the kernel spectrum
- sample_determinant: Xi(-kappa) on a grid, theta route where available
- airy_coeff_table_p2: GrandPotentialModel with the a_{l,n} at hbar = 2 pi
- z_trace_airy / z_trace_contour: Z(N) two ways
- scan_roots: grid bracketing with brentq and a bounded polish
- fredholm_zeros: zeros of Xi(-e^E) in an energy window
- n32_fit: slope of -log Z(N) against N^{3/2}
"""

import logging
import math
import warnings
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
from scipy.optimize import brentq

from app.config import get_settings
from app.exceptions import ConvergenceWarning, OutOfDiskError, UsageError
from app.schemas.bps import AiryCoefficient, GrandPotentialModel
from app.schemas.fredholm import DeterminantSample, ThetaFrame, TraceReport
from app.schemas.periods import PeriodData
from app.services.enumerative_service import (
    TWO_PI,
    grand_potential_2pi,
    grand_potential_2pi_series,
    grand_potential_2pi_terms,
    perturbative_coefficients_p2,
)
from app.services.kernel_service import kernel_grid, kernel_params
from app.services.periods_service import periods
from app.services.series_service import ps_eval, ps_exp, ps_pow
from app.services.specfun_service import airy_ai_derivative, jacobi_theta2, jacobi_theta3

logger = logging.getLogger(__name__)

LARGE_RADIUS_EDGE = math.log(27) / 3
ZERO_WINDOW_MARGIN = 0.25
AIRY_TOL = 1e-14
CONTOUR_TOL = 1e-9
SHEET_TOL = 1e-16
KERNEL_STEP = 0.05

_MAX_SHEETS = 50


def _workdps():
    return mpmath.workdps(get_settings().mp_dps)


def _check_energy(E) -> None:
    if E <= LARGE_RADIUS_EDGE:
        raise OutOfDiskError(f"log kappa = {float(E):.6g} needs to exceed log(27)/3 so that |z| < 1/27")


# --- theta representation ----------------------------------------------------

def _elliptic(t, z, pd: PeriodData):
    J, dF, d2F = grand_potential_2pi_terms(t, z, pd)
    xi = 3 * (t * d2F - dF) / (4 * mpmath.pi ** 2)
    return J, xi, d2F


def _theta_frame_mp(E, pd: PeriodData):
    z = mpmath.exp(-3 * E)
    t = 3 * E - ps_eval(pd.varpi1_tilde, z)
    J, xi, d2F = _elliptic(t, z, pd)
    tau = 9j * d2F / (2 * mpmath.pi) - mpmath.mpf(1) / 2
    return J, xi, tau


def theta_frame_p2(E: float, pd: Optional[PeriodData] = None) -> ThetaFrame:
    """
    Elliptic data of Xi(-e^E, 2 pi).

    Args:
        E: log kappa, above log(27)/3

    Raises:
        OutOfDiskError: If e^{-3E} >= 1/27
    """
    _check_energy(E)
    pd = pd or periods()
    with _workdps():
        J, xi, tau = _theta_frame_mp(mpmath.mpf(E), pd)
        return ThetaFrame(E=E, xi=float(xi), tau=complex(tau), prefactor_log=float(J))


def _rotated_theta2(xi, tau):
    """Re(e^{i pi/8} theta_2(xi - 1/4, tau)); real up to roundoff."""
    return mpmath.re(mpmath.expjpi(mpmath.mpf(1) / 8) * jacobi_theta2(xi - mpmath.mpf(1) / 4, tau))


def _theta2_factor(E, pd: PeriodData):
    """The sign-carrying factor of Xi(-e^E)."""
    _, xi, tau = _theta_frame_mp(E, pd)
    return _rotated_theta2(xi, tau)


def xi_closed_form_p2(kappa: float, negative: bool = True, pd: Optional[PeriodData] = None) -> float:
    """
    Fredholm determinant of local P^2 at hbar = 2 pi from the theta representation.

    Args:
        kappa: Positive magnitude, kappa > 3 so that z = kappa^{-3} < 1/27
        negative: Evaluate Xi(-kappa) = det(1 - kappa rho) (default) or Xi(kappa)

    Returns:
        Xi(-kappa) or Xi(kappa)

    Raises:
        OutOfDiskError: If kappa^{-3} >= 1/27

    Example:
        Xi(-kappa) changes sign across kappa = e^{2.5626420686}
    """
    if kappa <= 0:
        raise UsageError("kappa is a positive magnitude; choose the axis with 'negative'")
    E = math.log(kappa)
    _check_energy(E)
    pd = pd or periods()
    with _workdps():
        E = mpmath.mpf(E)
        if negative:
            J, xi, tau = _theta_frame_mp(E, pd)
            return float(mpmath.exp(J) * _rotated_theta2(xi, tau))
        z = -mpmath.exp(-3 * E)
        t = 3 * E - ps_eval(pd.varpi1_tilde, z)
        J, xi, d2F = _elliptic(t, z, pd)
        theta = jacobi_theta3(xi + mpmath.mpf(5) / 8, 9j * d2F / (2 * mpmath.pi))
        return float(mpmath.exp(J) * mpmath.re(theta))


def fredholm_determinant_sum(kappa: float, pd: Optional[PeriodData] = None) -> float:
    """
    Xi(kappa, 2 pi) = sum_n exp J(mu + 2 pi i n), mu = log|kappa| (+ i pi for kappa < 0).

    Sheets are added symmetrically until a pair contributes less than 1e-16 of the total.

    Raises:
        OutOfDiskError: If |kappa|^{-3} >= 1/27
    """
    if kappa == 0:
        return 1.0
    _check_energy(math.log(abs(kappa)))
    pd = pd or periods()
    with _workdps():
        mu = mpmath.mpf(math.log(abs(kappa)))
        if kappa < 0:
            mu += 1j * mpmath.pi
        total = mpmath.exp(grand_potential_2pi(mu, pd))
        for n in range(1, _MAX_SHEETS + 1):
            shift = 2j * mpmath.pi * n
            pair = mpmath.exp(grand_potential_2pi(mu + shift, pd)) + mpmath.exp(grand_potential_2pi(mu - shift, pd))
            total += pair
            if abs(pair) < SHEET_TOL * abs(total):
                break
        return float(mpmath.re(total))


def fredholm_determinant_kernel(kappa: float, step: float = KERNEL_STEP) -> float:
    """
    Xi(kappa, 2 pi) = prod_i (1 + kappa lambda_i) over the eigenvalues of rho_{1,1}.

    Valid for any real kappa; used below the large-radius window.
    """
    return float(np.prod(1.0 + kappa * _kernel_eigenvalues(step)))


@lru_cache(maxsize=4)
def _kernel_eigenvalues(step: float) -> np.ndarray:
    return kernel_grid(kernel_params(1, 1, TWO_PI), step).eigenvalues()


def sample_determinant(kappa_grid: Sequence[float], pd: Optional[PeriodData] = None) -> List[DeterminantSample]:
    """
    Xi(-kappa, 2 pi) on a grid of positive kappa.

    The theta representation is used inside the large-radius window, the kernel
    spectrum elsewhere.
    """
    samples = []
    edge = math.exp(LARGE_RADIUS_EDGE + ZERO_WINDOW_MARGIN)
    for kappa in kappa_grid:
        if kappa <= 0:
            raise UsageError("kappa grid must be positive")
        if kappa > edge:
            samples.append(DeterminantSample(kappa=kappa, value=xi_closed_form_p2(kappa, pd=pd), method="theta"))
        else:
            samples.append(DeterminantSample(kappa=kappa, value=fredholm_determinant_kernel(-kappa), method="kernel"))
    logger.info("sampled Xi(-kappa) at %d points", len(samples))
    return samples


# --- Airy expansion -----------------------------------------------------------

def airy_coeff_table_p2(cutoff: int = 30, pd: Optional[PeriodData] = None) -> GrandPotentialModel:
    """
    a_{l,n} of e^{J - J^(p)} = 1 + sum a_{l,n} mu^n e^{-l mu} at hbar = 2 pi, for 0 < l <= cutoff.

    With J - J^(p) = mu^2 c2(w) + mu c1(w) + c0(w), w = e^{-3 mu},

        a_{3p,n} = [w^p] sum_{j1 + 2 j2 = n} exp(c0) c1^{j1} c2^{j2} / (j1! j2!),

    so only l = 3p occurs and n <= 2p.
    """
    if cutoff < 3:
        raise UsageError("cutoff must admit at least l = 3")
    P = cutoff // 3
    pd = pd or periods()
    if P > pd.order:
        raise UsageError(f"cutoff {cutoff} needs series order {P}, have {pd.order}")
    A, B, C = perturbative_coefficients_p2(TWO_PI)
    with _workdps():
        c = grand_potential_2pi_series(pd, P)
        e0 = ps_exp(c[0])
        c1_powers = [ps_pow(c[1], j) for j in range(P + 1)]
        c2_powers = [ps_pow(c[2], j) for j in range(P + 1)]
        table = {}
        for j1 in range(P + 1):
            for j2 in range(P + 1 - j1):
                product = e0 * c1_powers[j1] * c2_powers[j2]
                weight = mpmath.factorial(j1) * mpmath.factorial(j2)
                for p in range(max(1, j1 + j2), P + 1):
                    key = (3 * p, j1 + 2 * j2)
                    table[key] = table.get(key, 0) + product[p] / weight
    entries = [AiryCoefficient(l=l, n=n, value=float(v)) for (l, n), v in sorted(table.items()) if v != 0]
    logger.info("Airy table at hbar=2pi: %d coefficients up to l=%d", len(entries), 3 * P)
    return GrandPotentialModel(hbar=TWO_PI, A=A, Bcoef=B, Ccoef=C, instanton_coeffs=entries)


def _airy_term(N: int, l: float, n: int, gpm: GrandPotentialModel):
    c13 = mpmath.cbrt(gpm.Ccoef)
    x = (N + l - gpm.Bcoef) / c13
    return (-1) ** n * c13 ** (-n) * airy_ai_derivative(x, n)


def z_trace_airy_report(N: int, gpm: GrandPotentialModel) -> TraceReport:
    if N < 1:
        raise UsageError("N must be at least 1")
    with _workdps():
        prefactor = mpmath.exp(gpm.A) / mpmath.cbrt(gpm.Ccoef)
        total = _airy_term(N, 0, 0, gpm)
        groups = sorted({e.l for e in gpm.instanton_coeffs})
        sizes = []
        converged = False
        for l in groups:
            term = mpmath.fsum(e.value * _airy_term(N, l, e.n, gpm) for e in gpm.instanton_coeffs if e.l == l)
            total += term
            sizes.append(abs(term))
            if abs(term) < AIRY_TOL * abs(total):
                converged = True
                break
        value = float(prefactor * total)
        error = float(prefactor * sizes[-1]) if sizes else 0.0
    if not converged and len(sizes) >= 2 and sizes[-1] >= sizes[-2]:
        warnings.warn(ConvergenceWarning(f"Airy sum for Z({N}) is not decreasing at l={groups[-1]}", value))
    return TraceReport(N=N, method="airy", value=value, error_estimate=error, hbar=gpm.hbar)


def z_trace_airy(N: int, gpm: GrandPotentialModel) -> float:
    """
    Z(N) = e^A / C^{1/3} sum a_{l,n} (-1)^n C^{-n/3} Ai^{(n)}((N + l - B) / C^{1/3}), a_{0,0} = 1.

    Examples:
        N=1 -> 1/9
        N=2 -> 1/(12 sqrt(3) pi) - 1/81

    Warns:
        ConvergenceWarning: If the l-groups stop decreasing before the 1e-14 tolerance
    """
    return z_trace_airy_report(N, gpm).value


def z_trace_contour_report(N: int, mu0: float = 2.0, pd: Optional[PeriodData] = None) -> TraceReport:
    if N < 1:
        raise UsageError("N must be at least 1")
    _check_energy(mu0)
    pd = pd or periods()
    with _workdps():
        direction = mpmath.expjpi(mpmath.mpf(1) / 3)
        anchor = mpmath.mpf(mu0)

        def integrand(rho):
            mu = anchor + rho * direction
            return mpmath.exp(grand_potential_2pi(mu, pd) - N * mu) * direction

        integral, error = mpmath.quad(integrand, [0, 2, 5, 10, mpmath.inf], error=True)
        value = float(mpmath.im(integral) / mpmath.pi)
    if error > CONTOUR_TOL:
        logger.warning("contour integral for Z(%d) has error estimate %.2g", N, float(error))
    return TraceReport(N=N, method="contour", value=value, error_estimate=float(error / mpmath.pi))


def z_trace_contour(N: int, mu0: float = 2.0, pd: Optional[PeriodData] = None) -> float:
    """
    Z(N) = (1/2 pi i) int e^{J(mu, 2 pi) - N mu} dmu along mu0 + rho e^{+-i pi/3}.

    J is real on the real axis, so the two rays combine into Im(upper ray) / pi.

    Raises:
        OutOfDiskError: If mu0 <= log(27)/3
    """
    return z_trace_contour_report(N, mu0, pd).value


# --- zeros --------------------------------------------------------------------

def scan_roots(g: Callable[[float], float], grid: Sequence[float],
               polish: Optional[Callable[[float], float]] = None) -> List[float]:
    """
    Sign changes of g on a grid, each refined with brentq and optionally polished.

    A grid point where g vanishes is reported once. A polished root outside its
    bracket, or a polish that fails to converge, falls back to the brentq root.
    """
    values = [g(x) for x in grid]
    roots = []
    for a, b, ga, gb in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if ga == 0:
            roots.append(float(a))
            continue
        if gb == 0 or ga * gb > 0:
            continue
        root = brentq(g, a, b, xtol=1e-12)
        if polish is not None:
            try:
                polished = polish(root)
            except (ValueError, ZeroDivisionError):
                polished = None
            if polished is not None and a <= polished <= b:
                root = polished
            else:
                logger.debug("polish left [%g, %g]; keeping the brentq root %.15g", a, b, root)
        roots.append(float(root))
    if values[-1] == 0:
        roots.append(float(grid[-1]))
    return roots


def fredholm_zeros(E_range: Tuple[float, float], step: float = 0.05, pd: Optional[PeriodData] = None) -> List[float]:
    """
    Energies E_n with Xi(-e^{E_n}, 2 pi) = 0 inside E_range.

    The lower end is raised to log(27)/3 + 0.25; an empty window gives [].
    Brackets come from a sign scan of the theta factor, roots from brentq and
    a secant polish in mpmath.

    Example:
        (2, 7) -> [2.5626420686, 3.9182131883, 4.9117898238, 5.7357370354, 6.4553592284]
    """
    lo, hi = E_range
    if lo > hi:
        raise UsageError("E_range must be (lower, upper)")
    lo = max(lo, LARGE_RADIUS_EDGE + ZERO_WINDOW_MARGIN)
    if lo >= hi:
        return []
    pd = pd or periods()

    def g(E: float) -> float:
        with _workdps():
            return float(_theta2_factor(mpmath.mpf(E), pd))

    def polish(rough: float) -> float:
        with _workdps():
            return float(mpmath.findroot(lambda E: _theta2_factor(E, pd), mpmath.mpf(rough)))

    grid = np.linspace(lo, hi, max(2, int(math.ceil((hi - lo) / step)) + 1))
    roots = scan_roots(g, grid, polish)
    logger.info("found %d zeros of Xi(-e^E) in [%g, %g]", len(roots), lo, hi)
    return roots


def n32_fit(N_values: Sequence[int], gpm: Optional[GrandPotentialModel] = None) -> Tuple[float, float]:
    """
    Least-squares fit -log Z(N) = slope N^{3/2} + intercept.

    Returns:
        (slope, intercept); the slope approaches (4 sqrt(pi)/9) sqrt(2 pi)
    """
    if len(N_values) < 2:
        raise UsageError("need at least two N values")
    gpm = gpm or airy_coeff_table_p2()
    x = np.array([N ** 1.5 for N in N_values], dtype=float)
    y = np.array([-math.log(z_trace_airy(N, gpm)) for N in N_values])
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept)
