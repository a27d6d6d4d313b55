"""
Quantizer Service

Weyl quantization of a mirror curve in the harmonic-oscillator basis.

Each term c e^{r x + s y} becomes c e^{mu a^+ + conj(mu) a} with
mu = (r sigma + i s hbar / sigma) / sqrt(2), whose oscillator matrix elements are

    <i| e^{r x + s y} |j> = e^{|mu|^2/2} sqrt(i! j!)
                            sum_k mu^{i-k} conj(mu)^{j-k} / ((i-k)! (j-k)! k!).

All summands share the phase e^{i theta (i-j)} (theta = arg mu), so the sum is
evaluated in the log domain with scipy.special.gammaln and logsumexp.

Matrix entries grow roughly like e^{2 |mu| sqrt(M)}, so in double precision the
low eigenvalues lose about log10(largest entry / lowest level) digits. With
working_precision="auto" the truncation runs in double precision while that loss
stays within DOUBLE_DIGIT_BUDGET and in mpmath otherwise, with enough digits
for the default ladder 200, 300, 400. For three-term curves the exact kernel
route in kernel_service reaches full double precision and is used by
method="auto".

Functions:
- ho_matrix_element: one oscillator matrix element of one term
- working_digits: precision a truncation of a given size needs
- build_truncated_matrix: M x M Hermitian truncation of O_S
- optimal_oscillator_scale: variational sigma at small M
- spectrum: extrapolated low-lying energies
- parity_sector_spectrum: spectrum restricted to even or odd oscillator states
"""

import logging
import math
import warnings
from typing import List, Optional, Union

import mpmath
import numpy as np
from scipy.linalg import eigh
from scipy.optimize import minimize_scalar
from scipy.special import gammaln, logsumexp

from app.exceptions import ConvergenceWarning, TruncationTooSmallError, UsageError
from app.schemas.curve import OperatorTerm, ToricCurveSpec
from app.schemas.quantization import QuantizationConfig, SpectrumResult
from app.services import kernel_service, toric_service

logger = logging.getLogger(__name__)

DOUBLE_DIGIT_BUDGET = 7
GUARD_DIGITS = 20


def _mu(term: OperatorTerm, cfg: QuantizationConfig, sigma: Optional[float] = None) -> complex:
    sigma = cfg.sigma if sigma is None else sigma
    return (term.r * sigma + 1j * term.s * cfg.hbar / sigma) / math.sqrt(2.0)


def ho_matrix_element(term: OperatorTerm, i: int, j: int, cfg: QuantizationConfig) -> complex:
    """
    <phi_i| coeff * e^{r x + s y} |phi_j> in the oscillator basis of scale sigma.

    Args:
        term: Operator term
        i, j: Basis indices (0-based)
        cfg: Quantization settings (hbar, sigma)

    Returns:
        The matrix element

    Example:
        term (1, 0, 1), i = j = 0 -> e^{sigma^2 / 4}
    """
    if i < 0 or j < 0:
        raise UsageError("basis indices must be non-negative")
    mu = _mu(term, cfg)
    if mu == 0:
        return complex(term.coeff) if i == j else 0j
    theta = math.atan2(mu.imag, mu.real)
    return term.coeff * complex(np.exp(_log_abs_element(mu, i, j)) * np.exp(1j * theta * (i - j)))


def _log_abs_element(mu: complex, i: int, j: int) -> float:
    """log |<i| e^{mu a^+ + conj(mu) a} |j>| for mu != 0."""
    log_abs = math.log(abs(mu))
    k = np.arange(min(i, j) + 1)
    logs = (0.5 * (gammaln(i + 1) + gammaln(j + 1)) + (i + j - 2 * k) * log_abs
            - gammaln(i - k + 1) - gammaln(j - k + 1) - gammaln(k + 1))
    return float(0.5 * abs(mu) ** 2 + logsumexp(logs))


def working_digits(spec: ToricCurveSpec, cfg: QuantizationConfig, size: int,
                   sigma: Optional[float] = None) -> Union[str, int]:
    """
    Precision for the size x size truncation: cfg.working_precision unless it is "auto".

    The lost digits are log10 of the largest corner entry over the classical
    minimum of O_S. Up to DOUBLE_DIGIT_BUDGET lost digits the answer is "double";
    beyond, the lost digits plus GUARD_DIGITS.
    """
    if cfg.working_precision != "auto":
        return cfg.working_precision
    sigma = cfg.sigma if sigma is None else sigma
    largest = 0.0
    for term in toric_service.build_operator_terms(spec):
        mu = _mu(term, cfg, sigma)
        if mu != 0:
            largest = max(largest, math.log(abs(term.coeff)) + _log_abs_element(mu, size - 1, size - 1))
    lost = (largest - math.log(toric_service.curve_minimum(spec)[0])) / math.log(10)
    if lost <= DOUBLE_DIGIT_BUDGET:
        return "double"
    return int(math.ceil(lost)) + GUARD_DIGITS


def _term_matrix_double(term: OperatorTerm, M: int, cfg: QuantizationConfig, sigma: float) -> np.ndarray:
    mu = _mu(term, cfg, sigma)
    if mu == 0:
        return term.coeff * np.eye(M, dtype=complex)
    log_abs = math.log(abs(mu))
    theta = math.atan2(mu.imag, mu.real)
    I, J = np.indices((M, M))
    lg = gammaln(np.arange(M) + 1.0)
    acc = np.full((M, M), -np.inf)
    for k in range(M):
        mask = (I >= k) & (J >= k)
        Ik, Jk = I[mask], J[mask]
        logs = 0.5 * (lg[Ik] + lg[Jk]) + (Ik + Jk - 2 * k) * log_abs - lg[Ik - k] - lg[Jk - k] - lg[k]
        acc[mask] = np.logaddexp(acc[mask], logs)
    return term.coeff * np.exp(0.5 * abs(mu) ** 2 + acc) * np.exp(1j * theta * (I - J))


def _term_matrix_mp(term: OperatorTerm, M: int, cfg: QuantizationConfig, sigma: float) -> mpmath.matrix:
    sig = mpmath.mpf(sigma)
    mu = (term.r * sig + 1j * term.s * mpmath.mpf(cfg.hbar) / sig) / mpmath.sqrt(2)
    mub = mpmath.conj(mu)
    fact = [mpmath.factorial(n) for n in range(M)]
    pw = [mu ** p / fact[p] for p in range(M)]
    pwb = [mub ** p / fact[p] for p in range(M)]
    pref = mpmath.exp(abs(mu) ** 2 / 2) * mpmath.mpf(term.coeff)
    A = mpmath.matrix(M, M)
    for i in range(M):
        for j in range(i, M):
            s = mpmath.fsum(pw[i - k] * pwb[j - k] / fact[k] for k in range(min(i, j) + 1))
            A[i, j] = pref * mpmath.sqrt(fact[i] * fact[j]) * s
            A[j, i] = mpmath.conj(A[i, j])
    return A


def build_truncated_matrix(spec: ToricCurveSpec, cfg: QuantizationConfig, size: Optional[int] = None,
                           sigma: Optional[float] = None):
    """
    M x M truncation of O_S in the oscillator basis.

    Args:
        spec: Curve
        cfg: Quantization settings
        size: Matrix size (defaults to the first size of the ladder)
        sigma: Oscillator scale (defaults to cfg.sigma)

    Returns:
        numpy complex array (double precision) or mpmath matrix (digits precision),
        symmetrised as (A + A^H)/2
    """
    M = size or cfg.sizes[0]
    sigma = cfg.sigma if sigma is None else sigma
    cfg = _at_precision(spec, cfg, M, sigma)
    terms = toric_service.build_operator_terms(spec)
    if cfg.working_precision == "double":
        A = sum(_term_matrix_double(t, M, cfg, sigma) for t in terms)
        return 0.5 * (A + A.conj().T)
    with mpmath.workdps(cfg.working_precision):
        A = mpmath.matrix(M, M)
        for t in terms:
            A += _term_matrix_mp(t, M, cfg, sigma)
        return A


def _at_precision(spec: ToricCurveSpec, cfg: QuantizationConfig, size: int, sigma: float) -> QuantizationConfig:
    digits = working_digits(spec, cfg, size, sigma)
    if digits == cfg.working_precision:
        return cfg
    return cfg.model_copy(update={"working_precision": digits})


def _eigenvalues(A, cfg: QuantizationConfig) -> List:
    if cfg.working_precision == "double":
        return list(eigh(A, eigvals_only=True))
    with mpmath.workdps(cfg.working_precision):
        ev = mpmath.eighe(A, eigvals_only=True)
        return sorted(mpmath.re(e) for e in ev)


def _log_levels(spec: ToricCurveSpec, cfg: QuantizationConfig, size: int, levels: int,
                sigma: float, indices: Optional[List[int]] = None) -> List:
    cfg = _at_precision(spec, cfg, size, sigma)
    A = build_truncated_matrix(spec, cfg, size, sigma)
    if indices is not None:
        A = A[np.ix_(indices, indices)] if cfg.working_precision == "double" else _mp_block(A, indices)
    lam = _eigenvalues(A, cfg)[:levels]
    if len(lam) < levels:
        raise TruncationTooSmallError(f"matrix of size {size} has fewer than {levels} levels")
    if any(x <= 0 for x in lam):
        raise TruncationTooSmallError(f"non-positive eigenvalue at size {size}; enlarge the basis")
    if cfg.working_precision == "double":
        return [math.log(x) for x in lam]
    with mpmath.workdps(cfg.working_precision):
        return [mpmath.log(x) for x in lam]


def _mp_block(A: mpmath.matrix, indices: List[int]) -> mpmath.matrix:
    B = mpmath.matrix(len(indices), len(indices))
    for a, i in enumerate(indices):
        for b, j in enumerate(indices):
            B[a, b] = A[i, j]
    return B


def richardson(sizes: List[int], values: List) -> tuple:
    """
    Polynomial extrapolation in 1/M to 1/M = 0 (Neville tableau).

    Returns:
        (extrapolated value, |difference of the last two extrapolants|)
    """
    h = [1.0 / m for m in sizes]
    table = [list(values)]
    for level in range(1, len(values)):
        prev = table[-1]
        row = []
        for i in range(len(prev) - 1):
            j = i + level
            row.append((h[i] * prev[i + 1] - h[j] * prev[i]) / (h[i] - h[j]))
        table.append(row)
    best = table[-1][0]
    if len(values) == 1:
        return best, float("nan")
    second = table[-2][-1]
    return best, abs(float(best - second))


def optimal_oscillator_scale(spec: ToricCurveSpec, hbar: float, basis_size: int = 20) -> float:
    """Variational sigma: minimise E_0 of the size-basis_size truncation over sigma."""
    size = max(20, basis_size)
    cfg = QuantizationConfig(hbar=hbar, ladder=[size], working_precision="double")
    s0 = math.sqrt(hbar)

    def ground(log_sigma: float) -> float:
        return _log_levels(spec, cfg, size, 1, math.exp(log_sigma))[0]

    res = minimize_scalar(ground, bounds=(math.log(0.25 * s0), math.log(4.0 * s0)), method="bounded",
                          options={"xatol": 1e-3})
    logger.debug("variational sigma for %s at hbar=%g: %.6g", spec.name, hbar, math.exp(res.x))
    return float(math.exp(res.x))


def _oscillator_spectrum(spec: ToricCurveSpec, cfg: QuantizationConfig, levels: int,
                         indices_for=None, method: str = "oscillator") -> SpectrumResult:
    sigma = cfg.oscillator_scale or optimal_oscillator_scale(spec, cfg.hbar)
    sizes = cfg.sizes
    per_size = []
    if len(sizes) == 1:
        logger.info("%s: single matrix size %d, no error estimate", spec.name, sizes[0])
    for M in sizes:
        indices = indices_for(M) if indices_for else None
        per_size.append(_log_levels(spec, cfg, M, levels, sigma, indices))
        logger.info("%s: size %d done (E_0 = %.12g)", spec.name, M, float(per_size[-1][0]))
    energies, errors = [], []
    for n in range(levels):
        value, err = richardson(sizes, [row[n] for row in per_size])
        if err > cfg.tolerance:
            logger.warning("%s: error estimate %.3g of level %d exceeds %.3g", spec.name, err, n, cfg.tolerance)
            warnings.warn(ConvergenceWarning(
                f"E_{n} of {spec.name} is uncertain by {err:.3g} (target {cfg.tolerance:g}); enlarge the ladder",
                float(value)))
        energies.append(float(value))
        errors.append(err)
    echo = cfg.model_copy(update={"oscillator_scale": sigma})
    return SpectrumResult(energies=energies, errors=errors, sizes=sizes, method=method, config=echo)


def spectrum(spec: ToricCurveSpec, cfg: QuantizationConfig, levels: int = 5) -> SpectrumResult:
    """
    Lowest energies E_n = log lambda_n of the quantized curve.

    With method="auto", curves c1 e^x + c2 e^y + c3 e^{-mx-ny} use the exact
    kernel route; everything else uses the oscillator truncation with Richardson
    extrapolation over the size ladder.

    Args:
        spec: Curve
        cfg: Quantization settings
        levels: Number of levels

    Returns:
        SpectrumResult

    Raises:
        TruncationTooSmallError: If a requested level has a non-positive eigenvalue
        UsageError: If method="kernel" is requested for a curve that is not three-term
    """
    if levels < 1:
        raise UsageError("at least one level is required")
    reduction = kernel_service.three_term_reduction(spec)
    if cfg.method == "kernel" and reduction is None:
        raise UsageError(f"{spec.name} is not a three-term curve; use the oscillator route")
    if cfg.method == "kernel" or (cfg.method == "auto" and reduction is not None):
        m, n, shift = reduction
        energies, errors, sizes = kernel_service.kernel_spectrum(m, n, cfg.hbar, levels)
        return SpectrumResult(energies=[e + shift for e in energies], errors=errors, sizes=sizes,
                              method="kernel", config=cfg)
    return _oscillator_spectrum(spec, cfg, levels)


def _is_parity_symmetric(spec: ToricCurveSpec) -> bool:
    terms = dict(zip(spec.vertices, spec.coefficients))
    return all((-r, -s) in terms and math.isclose(terms[(-r, -s)], c) for (r, s), c in terms.items())


def parity_sector_spectrum(spec: ToricCurveSpec, cfg: QuantizationConfig, parity: int,
                           levels: int = 3) -> SpectrumResult:
    """
    Spectrum in the even (parity=0) or odd (parity=1) sector of (x, y) -> (-x, -y).

    The oscillator state phi_i has parity (-1)^i, so the sector is the sub-block
    on indices of one parity.

    Raises:
        UsageError: If the curve is not parity symmetric
    """
    if parity not in (0, 1):
        raise UsageError("parity must be 0 (even) or 1 (odd)")
    if not _is_parity_symmetric(spec):
        raise UsageError(f"{spec.name} is not symmetric under (x, y) -> (-x, -y)")
    osc = cfg.model_copy(update={"method": "oscillator"})
    return _oscillator_spectrum(spec, osc, levels, indices_for=lambda M: list(range(parity, M, 2)),
                                method=f"oscillator-{'even' if parity == 0 else 'odd'}")
