"""
Special Function Service

Special functions used by the analytic formulas of the lab.

Airy, digamma, dilogarithm and theta functions come from mpmath at the
configured working precision. Faddeev's quantum dilogarithm has no library
implementation; it is computed from its integral representation with a
trapezoid rule on a line parallel to the real axis, vectorised with numpy so
that whole kernel grids are evaluated at once.

Functions:
- airy_ai: Ai(x) and Ai'(x)
- airy_ai_derivative: n-th derivative of Ai
- digamma: psi(x) for x > 0
- digamma_difference: exact psi(m) - psi(n) for positive integers
- polylog2: complex dilogarithm
- bloch_wigner: Bloch-Wigner function D(z)
- jacobi_theta2 / jacobi_theta3: theta_2, theta_3 (z, tau) with q = e^{i pi tau}
- faddeev_phi / faddeev_phi_grid: Faddeev's quantum dilogarithm
- psi_ac / psi_ac_grid: e^{2 pi a x} / Phi_b(x - i(a+c))
"""

import logging
from fractions import Fraction
from typing import Tuple

import mpmath
import numpy as np

from app.config import get_settings
from app.exceptions import DomainError
from app.schemas.kernel import QdilogParams

logger = logging.getLogger(__name__)


def _workdps():
    return mpmath.workdps(get_settings().mp_dps)


# --- Airy ------------------------------------------------------------------

def airy_ai(x: float) -> Tuple[mpmath.mpf, mpmath.mpf]:
    """
    Airy function and its first derivative.

    Args:
        x: Real argument

    Returns:
        (Ai(x), Ai'(x))
    """
    with _workdps():
        return +mpmath.airyai(x), +mpmath.airyai(x, derivative=1)


def airy_ai_derivative(x, n: int):
    """
    n-th derivative of Ai at x.

    Uses Ai'' = x Ai differentiated n times:
    Ai^(n+2) = x Ai^(n) + n Ai^(n-1).
    """
    if n < 0:
        raise DomainError("negative derivative order")
    with _workdps():
        x = mpmath.mpmathify(x)
        ai, aip = mpmath.airyai(x), mpmath.airyai(x, derivative=1)
        derivs = [ai, aip]
        for k in range(0, n - 1):
            prev = derivs[k - 1] if k >= 1 else 0
            derivs.append(x * derivs[k] + k * prev)
        return +derivs[n]


# --- digamma ---------------------------------------------------------------

def digamma(x: float) -> mpmath.mpf:
    """psi(x) for x > 0."""
    if x <= 0:
        raise DomainError(f"digamma is only evaluated on x > 0, got {x}")
    with _workdps():
        return +mpmath.digamma(x)


def harmonic(n: int) -> Fraction:
    """H_n = 1 + 1/2 + ... + 1/n, exact."""
    return sum((Fraction(1, k) for k in range(1, n + 1)), Fraction(0))


def digamma_difference(m: int, n: int) -> Fraction:
    """
    Exact psi(m) - psi(n) for positive integers, equal to H_{m-1} - H_{n-1}.

    Example:
        digamma_difference(6, 1) == Fraction(137, 60)
    """
    if m < 1 or n < 1:
        raise DomainError("digamma_difference needs positive integers")
    lo, hi = sorted((m, n))
    diff = sum((Fraction(1, k) for k in range(lo, hi)), Fraction(0))
    return diff if m >= n else -diff


# --- dilogarithm -----------------------------------------------------------

def polylog2(z) -> mpmath.mpc:
    with _workdps():
        return +mpmath.polylog(2, z)


def bloch_wigner(z) -> float:
    """
    Bloch-Wigner function D(z) = Im Li_2(z) + arg(1 - z) log|z|.

    The argument branch is (-pi, pi]. Points outside the unit disk use
    D(z) = -D(1/z).

    Raises:
        DomainError: If z is 0 or 1
    """
    with _workdps():
        zz = mpmath.mpc(z)
        if zz == 0 or zz == 1:
            raise DomainError(f"Bloch-Wigner function is singular at z={z}")
        if abs(zz) > 1:
            return -bloch_wigner(1 / zz)
        value = mpmath.im(mpmath.polylog(2, zz)) + mpmath.arg(1 - zz) * mpmath.log(abs(zz))
        return float(value)


# --- theta -----------------------------------------------------------------

def jacobi_theta2(z, tau):
    """
    theta_2(z, tau) = 2 sum_{n>=0} q^{(n+1/2)^2} cos((2n+1) pi z), q = e^{i pi tau}.

    Raises:
        DomainError: If Im(tau) <= 0
    """
    with _workdps():
        tau = mpmath.mpc(tau)
        if mpmath.im(tau) <= 0:
            raise DomainError(f"theta_2 needs Im(tau) > 0, got tau={tau}")
        q = mpmath.exp(1j * mpmath.pi * tau)
        return +mpmath.jtheta(2, mpmath.pi * mpmath.mpmathify(z), q)


def jacobi_theta3(z, tau):
    """
    theta_3(z, tau) = sum_n q^{n^2} e^{2 pi i n z}, q = e^{i pi tau}.

    Raises:
        DomainError: If Im(tau) <= 0
    """
    with _workdps():
        tau = mpmath.mpc(tau)
        if mpmath.im(tau) <= 0:
            raise DomainError(f"theta_3 needs Im(tau) > 0, got tau={tau}")
        q = mpmath.exp(1j * mpmath.pi * tau)
        return +mpmath.jtheta(3, mpmath.pi * mpmath.mpmathify(z), q)


# --- Faddeev's quantum dilogarithm -----------------------------------------

_PHI_TOL = 1e-13
_PHI_MAX_HALVINGS = 5


def _check_strip(z: np.ndarray, p: QdilogParams) -> None:
    bad = np.abs(z.imag) >= p.strip_half_width
    if np.any(bad):
        raise DomainError(
            f"Phi_b(z) requested at Im z = {z.imag[bad][0]:.6g}, outside the strip "
            f"|Im z| < {p.strip_half_width:.6g}"
        )


def _log_sinh(t: np.ndarray) -> np.ndarray:
    """log sinh(t) up to multiples of 2 pi i, without overflow for large |Re t|."""
    s = np.where(t.real >= 0, t, -t)
    out = s + np.log1p(-np.exp(-2.0 * s)) - np.log(2.0)
    return np.where(t.real >= 0, out, out + 1j * np.pi)


def _log_phi_trapezoid(z: np.ndarray, b: float, eps: float, h: float, cutoff: float) -> np.ndarray:
    """Trapezoid rule for int e^{-2izw}/(4 sinh(bw) sinh(w/b) w) dw on Im w = eps."""
    u = np.arange(-cutoff, cutoff + 0.5 * h, h)
    w = u + 1j * eps
    log_weight = -np.log(4.0) - _log_sinh(b * w) - _log_sinh(w / b) - np.log(w)
    out = np.empty(z.shape, dtype=complex)
    # chunk over z to bound the size of the exponent matrix
    chunk = max(1, 2_000_000 // len(u))
    for start in range(0, len(z), chunk):
        zs = z[start:start + chunk]
        out[start:start + chunk] = h * np.exp(-2j * np.outer(zs, w) + log_weight).sum(axis=1)
    return out


def _log_phi_side(z: np.ndarray, p: QdilogParams, below: bool) -> Tuple[np.ndarray, float]:
    """
    log Phi_b on one half-plane of Re z.

    For Re z < 0 the contour Im w = +eps is used (the phase e^{-2izw} is damped);
    for Re z >= 0 the contour is moved below the pole at w = 0 and the residue
    i pi z^2 + i pi (b^2 + b^-2)/12 is added back.
    """
    b = p.b
    eps0 = 0.5 * np.pi * min(b, 1.0 / b)
    eps = -eps0 if below else eps0
    decay = 2.0 * p.strip_half_width - 2.0 * np.max(np.abs(z.imag))
    cutoff = min(45.0 / decay, 500.0)
    xmax = float(np.max(np.abs(z.real)))
    h = min(0.2, 2.0 * np.pi * eps0 / (4.0 * eps0 * xmax + 40.0))

    value = _log_phi_trapezoid(z, b, eps, h, cutoff)
    diff = np.inf
    for _ in range(_PHI_MAX_HALVINGS):
        h *= 0.5
        refined = _log_phi_trapezoid(z, b, eps, h, cutoff)
        diff = float(np.max(np.abs(refined - value)))
        value = refined
        if diff < _PHI_TOL * max(1.0, float(np.max(np.abs(value)))):
            break
    else:
        logger.warning("Phi_b trapezoid did not settle: last step difference %.3g", diff)

    if below:
        value = value + 1j * np.pi * z ** 2 + 1j * np.pi * (b ** 2 + b ** -2) / 12.0
    return value, diff


def log_faddeev_phi_grid(z, p: QdilogParams) -> np.ndarray:
    """
    log Phi_b(z) on an array of points inside the strip |Im z| < (b + 1/b)/2.

    Raises:
        DomainError: If any point lies outside the strip
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    _check_strip(z, p)
    out = np.empty(z.shape, dtype=complex)
    neg = z.real < 0
    if np.any(neg):
        out[neg], _ = _log_phi_side(z[neg], p, below=False)
    if np.any(~neg):
        out[~neg], _ = _log_phi_side(z[~neg], p, below=True)
    return out


def faddeev_phi_grid(z, p: QdilogParams) -> np.ndarray:
    return np.exp(log_faddeev_phi_grid(z, p))


def faddeev_phi(z: complex, p: QdilogParams) -> complex:
    """
    Faddeev's quantum dilogarithm

        Phi_b(z) = exp( int_{R + i0} e^{-2izw} / (4 sinh(wb) sinh(w/b) w) dw )

    inside the strip |Im z| < (b + 1/b)/2.

    Args:
        z: Complex argument
        p: Quantum dilogarithm parameters

    Returns:
        Phi_b(z) as a Python complex

    Raises:
        DomainError: If z lies outside the strip
    """
    return complex(faddeev_phi_grid([z], p)[0])


def psi_ac_grid(x, a: float, c: float, p: QdilogParams) -> np.ndarray:
    """psi_{a,c}(x) = e^{2 pi a x} / Phi_b(x - i(a+c)) on an array of real x."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    log_phi = log_faddeev_phi_grid(x - 1j * (a + c), p)
    return np.exp(2.0 * np.pi * a * x - log_phi)


def psi_ac(x: float, a: float, c: float, p: QdilogParams) -> complex:
    return complex(psi_ac_grid([x], a, c, p)[0])
