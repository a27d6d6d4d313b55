"""
Kernel Service

Operator-side analytics for the three-term operators

    O_{m,n} = e^x + e^y + e^{-m x - n y},   rho_{m,n} = O_{m,n}^{-1},

whose inverse has the explicit integral kernel

    rho(p, p') = conj(psi(p)) psi(p') / (2 b cosh(pi (p - p' + i(a + c - n c)) / b)),

with psi = psi_{a,c} built from Faddeev's quantum dilogarithm.

All integrals over R^l are done with the trapezoid rule on one uniform grid
(a Nystrom discretisation). The integrands are analytic in a strip around the
real axis and decay exponentially, so the rule converges exponentially in the
step; the step is halved until two successive values agree. On a grid with
weights h the l-dimensional trapezoid rule for Tr rho^l is exactly
Tr (hK)^l, and the one for (1/N!) int det rho is the N-th elementary symmetric
function of the eigenvalues of hK.

Functions:
- kernel_params: (m, n, hbar) -> KernelParams
- rho_kernel: rho(p, p')
- kernel_grid: Nystrom matrix h*rho on a truncated uniform grid
- trace_power: Tr rho^l (l <= 3)
- fermionic_trace: Z(N) = (1/N!) int det rho(p_i, p_j) (N <= 3)
- kernel_spectrum: E_n = -log of the eigenvalues of rho
- three_term_reduction: recognise c1 e^x + c2 e^y + c3 e^{-mx-ny}
- analytic_trace_p2_third: closed form of Tr rho_{1,1} at hbar = 2 pi/3
- calibrate_matrix_model_constant / matrix_model_z: the O(2) matrix model form
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import mpmath
import numpy as np

from app.exceptions import (
    TruncationTooSmallError,
    UnsupportedOrderError,
    UnsupportedParametersError,
    UsageError,
)
from app.schemas.curve import ToricCurveSpec
from app.schemas.kernel import KernelParams, KernelTraceReport
from app.services.specfun_service import psi_ac_grid

logger = logging.getLogger(__name__)

MAX_TRACE_POWER = 3
MAX_PARTICLES = 3

_TAIL_THRESHOLD = 1e-17
_STEP_TOL = 1e-12
_MAX_HALVINGS = 4


def kernel_params(m: float, n: float, hbar: float) -> KernelParams:
    """
    Parameters of rho_{m,n} at a given hbar.

    Examples:
        (1, 1, 2 pi) -> b = sqrt(3), a = c = b/6
        (1, 1, 2 pi/3) -> b = 1, a = c = 1/6
    """
    if m <= 0 or n <= 0 or hbar <= 0:
        raise UsageError(f"kernel_params needs m, n, hbar > 0 (got {m}, {n}, {hbar})")
    s = m + n + 1
    b = math.sqrt(hbar * s / (2 * math.pi))
    return KernelParams(m=m, n=n, hbar=hbar, b=b, a=m * b / (2 * s), c=b / (2 * s))


def _psi(p, kp: KernelParams) -> np.ndarray:
    return psi_ac_grid(p, kp.a, kp.c, kp.qdilog)


def _cosh_kernel(p: np.ndarray, q: np.ndarray, kp: KernelParams) -> np.ndarray:
    d = p[:, None] - q[None, :]
    return 1.0 / (2.0 * kp.b * np.cosh(np.pi * (d + 1j * kp.gamma) / kp.b))


def rho_kernel(p: float, p_prime: float, kp: KernelParams) -> complex:
    """rho_{m,n}(p, p')."""
    psi = _psi(np.array([p, p_prime]), kp)
    denom = 2.0 * kp.b * np.cosh(np.pi * (p - p_prime + 1j * kp.gamma) / kp.b)
    return complex(np.conj(psi[0]) * psi[1] / denom)


def diagonal_decay_point(kp: KernelParams, threshold: float = 1e-8) -> float:
    """Smallest P0 with |rho(p, p)| < threshold for |p| > P0, read off a coarse grid."""
    p = np.arange(-80.0, 80.0, 0.25)
    diag = np.abs(_psi(p, kp)) ** 2 / (2.0 * kp.b * math.cos(math.pi * kp.gamma / kp.b))
    above = np.nonzero(diag >= threshold)[0]
    if len(above) == 0:
        return 0.0
    return float(max(abs(p[above[0]]), abs(p[above[-1]])))


def _support(kp: KernelParams) -> Tuple[float, float]:
    """Interval outside which |psi|^2 < _TAIL_THRESHOLD * peak."""
    # |psi|^2 decays like e^{4 pi a p} on the left and e^{-4 pi c p} on the right
    left = -math.log(1 / _TAIL_THRESHOLD) / (4 * math.pi * kp.a) - 4.0
    right = math.log(1 / _TAIL_THRESHOLD) / (4 * math.pi * kp.c) + 4.0
    p = np.linspace(left, right, 400)
    weight = np.abs(_psi(p, kp)) ** 2
    keep = np.nonzero(weight >= _TAIL_THRESHOLD * weight.max())[0]
    step = p[1] - p[0]
    return float(p[keep[0]] - step), float(p[keep[-1]] + step)


@dataclass(frozen=True)
class KernelGrid:
    """Nystrom discretisation: nodes p_i with weight h, matrix h*rho(p_i, p_j)."""
    nodes: np.ndarray
    step: float
    psi: np.ndarray
    matrix: np.ndarray

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of h*rho in decreasing order."""
        return np.sort(np.linalg.eigvalsh(self.matrix))[::-1]


def kernel_grid(kp: KernelParams, step: float = 0.1, support: Optional[Tuple[float, float]] = None) -> KernelGrid:
    """
    Nystrom matrix on a uniform grid.

    Args:
        kp: Kernel parameters
        step: Grid spacing h
        support: (left, right) truncation of the p-line; found from the decay of psi if omitted

    Returns:
        KernelGrid with the Hermitian matrix h*rho(p_i, p_j)
    """
    left, right = support if support is not None else _support(kp)
    count = int(math.ceil((right - left) / step)) + 1
    nodes = left + step * np.arange(count)
    psi = _psi(nodes, kp)
    matrix = step * np.conj(psi)[:, None] * psi[None, :] * _cosh_kernel(nodes, nodes, kp)
    # exact Hermitian symmetry; the cosh factor is Hermitian up to roundoff
    matrix = 0.5 * (matrix + matrix.conj().T)
    logger.debug("kernel grid m=%g n=%g hbar=%g: %d nodes, h=%g", kp.m, kp.n, kp.hbar, count, step)
    return KernelGrid(nodes=nodes, step=step, psi=psi, matrix=matrix)


def _refine(kp: KernelParams, evaluate, step: float = 0.1):
    """Evaluate a grid functional with step halving until two values agree."""
    support = _support(kp)
    grid = kernel_grid(kp, step, support)
    value = evaluate(grid)
    error = float("inf")
    for _ in range(_MAX_HALVINGS):
        step *= 0.5
        grid = kernel_grid(kp, step, support)
        new = evaluate(grid)
        error = float(np.max(np.abs(np.asarray(new) - np.asarray(value))))
        value = new
        if error < _STEP_TOL * max(1.0, float(np.max(np.abs(np.asarray(value))))):
            break
    return value, error, grid


def _elementary_symmetric(values: np.ndarray, order: int) -> List[float]:
    """e_0..e_order of the given numbers."""
    e = [1.0] + [0.0] * order
    for lam in values:
        for k in range(order, 0, -1):
            e[k] += lam * e[k - 1]
    return e


def trace_power_report(l: int, kp: KernelParams) -> KernelTraceReport:
    if l < 1:
        raise UsageError("trace power must be at least 1")
    if l > MAX_TRACE_POWER:
        raise UnsupportedOrderError(f"Tr rho^{l}: only l <= {MAX_TRACE_POWER} is supported")
    value, error, _ = _refine(kp, lambda g: float(np.sum(g.eigenvalues() ** l)))
    return KernelTraceReport(m=kp.m, n=kp.n, hbar=kp.hbar, quantity=f"Tr rho^{l}", value=value, error=error)


def trace_power(l: int, kp: KernelParams) -> float:
    """
    Tr rho^l for l <= 3.

    Examples:
        l=1, (1, 1, 2 pi/3) -> 0.46045214817283...
        l=1, (1, 1, 2 pi) -> 1/9

    Raises:
        UnsupportedOrderError: If l > 3
    """
    return trace_power_report(l, kp).value


def fermionic_trace_report(N: int, kp: KernelParams) -> KernelTraceReport:
    if N < 1:
        raise UsageError("N must be at least 1")
    if N > MAX_PARTICLES:
        raise UnsupportedOrderError(f"Z({N}): only N <= {MAX_PARTICLES} is supported")
    value, error, _ = _refine(kp, lambda g: _elementary_symmetric(g.eigenvalues(), N)[N])
    return KernelTraceReport(m=kp.m, n=kp.n, hbar=kp.hbar, quantity=f"Z({N})", value=value, error=error)


def fermionic_trace(N: int, kp: KernelParams) -> float:
    """
    Z(N) = (1/N!) int det rho(p_i, p_j) d^N p for N <= 3.

    Example:
        N=2, (1, 1, 2 pi) -> 1/(12 sqrt(3) pi) - 1/81

    Raises:
        UnsupportedOrderError: If N > 3
    """
    return fermionic_trace_report(N, kp).value


def kernel_spectrum(m: float, n: float, hbar: float, levels: int) -> Tuple[List[float], List[float], List[int]]:
    """
    Lowest energies of O_{m,n} from the eigenvalues of rho_{m,n}.

    Returns:
        (energies E_0..E_{levels-1}, error estimates, [grid size])
    """
    kp = kernel_params(m, n, hbar)

    def energies(grid: KernelGrid) -> np.ndarray:
        lam = grid.eigenvalues()[:levels]
        if np.any(lam <= 0):
            raise TruncationTooSmallError(f"kernel grid resolves fewer than {levels} positive eigenvalues")
        return -np.log(lam)

    values, _, grid = _refine(kp, energies)
    # per-level error: recompute the difference at the final two steps
    coarse = energies(kernel_grid(kp, 2 * grid.step, (grid.nodes[0], grid.nodes[-1])))
    errors = np.abs(values - coarse)
    return [float(v) for v in values], [float(e) for e in errors], [len(grid.nodes)]


def three_term_reduction(spec: ToricCurveSpec) -> Optional[Tuple[float, float, float]]:
    """
    Recognise c1 e^x + c2 e^y + c3 e^{-mx-ny}.

    Shifting x and y (a unitary change) maps such a curve to e^kappa O_{m,n}
    with kappa = log(c3 c1^m c2^n) / (m + n + 1), so E_n = kappa + E_n(m, n).

    Returns:
        (m, n, kappa) or None when the curve is not of this form
    """
    if len(spec.vertices) != 3:
        return None
    terms = dict(zip(spec.vertices, spec.coefficients))
    if (1, 0) not in terms or (0, 1) not in terms:
        return None
    (third,) = [v for v in spec.vertices if v not in ((1, 0), (0, 1))]
    m, n = -third[0], -third[1]
    if m <= 0 or n <= 0:
        return None
    lam = terms[third] * terms[(1, 0)] ** m * terms[(0, 1)] ** n
    return float(m), float(n), math.log(lam) / (m + n + 1)


def analytic_trace_p2_third() -> float:
    """Tr rho_{1,1} at hbar = 2 pi/3: (1/3) exp(V / 2 pi), V = 2 Im Li_2(e^{i pi/3})."""
    V = 2 * mpmath.im(mpmath.polylog(2, mpmath.exp(1j * mpmath.pi / 3)))
    return float(mpmath.exp(V / (2 * mpmath.pi)) / 3)


# --- O(2) matrix model -------------------------------------------------------

def matrix_model_constant_closed_form(m: float, n: float) -> float:
    """(m + 1 - n) / (2 (m + n + 1)); the shift gamma/b of the kernel."""
    return (m + 1 - n) / (2 * (m + n + 1))


def _require_local_p2(kp: KernelParams) -> None:
    if kp.m != 1 or kp.n != 1:
        raise UnsupportedParametersError(
            f"the matrix model is only validated for m = n = 1 (got m={kp.m}, n={kp.n})"
        )


def _matrix_model_weights(grid: KernelGrid, kp: KernelParams) -> Tuple[np.ndarray, np.ndarray]:
    """Nodes u_i = 2 pi p_i / b and weights |psi(b u_i / 2 pi)|^2 du / 2 pi."""
    u = 2 * np.pi * grid.nodes / kp.b
    du = 2 * np.pi * grid.step / kp.b
    return u, np.abs(grid.psi) ** 2 * du / (2 * np.pi)


def calibrate_matrix_model_constant(kp: KernelParams) -> float:
    """
    C_{m,n} fixed by the N = 1 identity 2 cos(pi C) = int du/(2 pi) |psi|^2 / Tr rho.
    """
    _require_local_p2(kp)
    trace = trace_power(1, kp)
    grid = kernel_grid(kp, 0.05)
    _, w = _matrix_model_weights(grid, kp)
    ratio = float(np.sum(w)) / (2.0 * trace)
    if abs(ratio) > 1:
        raise UnsupportedParametersError(f"calibration gave cos(pi C) = {ratio:.6g} outside [-1, 1]")
    constant = math.acos(ratio) / math.pi
    logger.info("matrix model constant C = %.12g (closed form %.12g)",
                constant, matrix_model_constant_closed_form(kp.m, kp.n))
    return constant


def _matrix_model_value(grid: KernelGrid, kp: KernelParams, N: int, constant: float) -> float:
    u, w = _matrix_model_weights(grid, kp)
    d = u[:, None] - u[None, :]
    # 4 sinh^2(d/2) / (2 cosh(d/2 + i pi C) * 2 cosh(-d/2 + i pi C)), real and bounded
    ratio = np.sinh(d / 2) ** 2 / np.abs(np.cosh(d / 2 + 1j * np.pi * constant)) ** 2
    diag = 2 * math.cos(math.pi * constant)
    if N == 1:
        return float(np.sum(w)) / diag
    if N == 2:
        return float(w @ ratio @ w) / (2 * diag ** 2)
    V = ratio * w[None, :]
    inner = np.sum((V @ ratio) * V, axis=1)
    return float(np.sum(w * inner)) / (6 * diag ** 3)


def matrix_model_z(N: int, kp: KernelParams, constant: Optional[float] = None) -> float:
    """
    Z(N) from the O(2) matrix model representation (m = n = 1, N <= 3).

    Args:
        N: Number of particles
        kp: Kernel parameters with m = n = 1
        constant: C_{1,1}; calibrated at N = 1 when omitted

    Raises:
        UnsupportedParametersError: If (m, n) != (1, 1)
        UnsupportedOrderError: If N > 3
    """
    _require_local_p2(kp)
    if N < 1:
        raise UsageError("N must be at least 1")
    if N > MAX_PARTICLES:
        raise UnsupportedOrderError(f"matrix model Z({N}): only N <= {MAX_PARTICLES} is supported")
    if constant is None:
        constant = calibrate_matrix_model_constant(kp)
    value, _, _ = _refine(kp, lambda g: _matrix_model_value(g, kp, N, constant), step=0.1)
    return float(value)
