"""
Enumerative Service

BPS data and the generating functionals built from it: the Gopakumar-Vafa
(worldsheet) free energy, the Nekrasov-Shatashvili free energy and the grand
potential J = J^WKB + J^WS of local P^2.

Sign conventions used throughout:
- spin sum: sum (-1)^{2jR} (2jR+1) chi_{jL}(q) N^d_{jL,jR} = sum_g n^d_g (q^{1/2} + q^{-1/2})^{2g}
- NS instanton sum carries (-1)^{2jL+2jR}, so that hbar F^NS -> F_0 as hbar -> 0
- the worldsheet sum carries (-1)^{w d.B}
With these signs the double and single poles of J^WKB and J^WS cancel at
hbar = 2 pi and hbar = pi.

Functions:
- gw_from_gv / gv_from_gw: genus-zero multicover sum and its inversion
- gv_genus_one_from_f1: genus-one GV numbers from the F_1 instanton series
- load_bps_table / validate_bps_table: versioned data files with consistency checks
- check_spin_sum: residual of the refined / unrefined identity at one q
- gv_free_energy: worldsheet generating functional
- ns_free_energy: NS free energy (polynomial and instanton parts)
- perturbative_coefficients_p2 / a_constant_p2: A, B, C of local P^2
- wkb_grand_potential / worldsheet_grand_potential / grand_potential_p2
- grand_potential_2pi: J(mu, 2 pi) for complex mu (closed form)
- grand_potential_2pi_reference: the same from the Q-expansion of F_0
- grand_potential_2pi_series: J - J^(p) at hbar = 2 pi as mu-polynomials in e^{-3 mu}
- hmo_cancellation_check: pole cancellation between J^WKB and J^WS
"""

import json
import logging
import math
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
from pydantic import ValidationError

from app.config import get_settings
from app.exceptions import BPSDataError, OutOfDiskError, PoleError, UsageError
from app.schemas.bps import BPSTable, BPSValidationReport, HMOReport
from app.schemas.periods import PeriodData
from app.services.periods_service import (
    f0_series,
    genus_one,
    genus_one_series,
    genus_one_z_series,
    instanton_z_series,
    periods,
)
from app.services.series_service import TruncatedSeries, ps_eval, ps_theta

logger = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent.parent / "data" / "bps"
DEFAULT_TABLE = "local_p2_v1"

SPIN_SUM_TOLERANCE = 1e-10
POLE_TOLERANCE = 1e-8
TWO_PI = 2 * math.pi

_TERM_CUTOFF = 1e-17
_MAX_WRAPPING = 500


def _workdps():
    return mpmath.workdps(get_settings().mp_dps)


# --- multicover ---------------------------------------------------------------

def _divisors(d: int) -> List[int]:
    return [w for w in range(1, d + 1) if d % w == 0]


def gw_from_gv(gv: Sequence) -> List[Fraction]:
    """
    N_0^d = sum_{w | d} n_0^{d/w} / w^3, for d = 1..len(gv).

    Args:
        gv: n_0^1, n_0^2, ...
    """
    n = [Fraction(x) for x in gv]
    return [sum((n[d // w - 1] / w ** 3 for w in _divisors(d)), Fraction(0)) for d in range(1, len(n) + 1)]


def gv_from_gw(gw: Sequence) -> List[Fraction]:
    """
    Invert N_0^d = sum_{w | d} n_0^{d/w} / w^3.

    Examples:
        gv_from_gw([3]) == [3]
        gv_from_gw([3, Fraction(-45, 8)]) == [3, -6]
    """
    N = [Fraction(x) for x in gw]
    n: List[Fraction] = []
    for d in range(1, len(N) + 1):
        covers = sum((n[d // w - 1] / w ** 3 for w in _divisors(d) if w > 1), Fraction(0))
        n.append(N[d - 1] - covers)
    return n


def gv_genus_one_from_f1(f1: Sequence, n0: Sequence) -> List[Fraction]:
    """
    Genus-one GV numbers from F_1^inst = sum_d sum_w (n_0^d / 12 + n_1^d) e^{-w d t} / w.

    Args:
        f1: Coefficients of Q^1, Q^2, ... of F_1 - b t
        n0: Genus-zero numbers n_0^1, n_0^2, ...
    """
    c = [Fraction(x) for x in f1]
    n0 = [Fraction(x) for x in n0]
    n1: List[Fraction] = []
    for d in range(1, len(c) + 1):
        covers = sum(((n0[d // w - 1] / 12 + n1[d // w - 1]) / w for w in _divisors(d) if w > 1), Fraction(0))
        n1.append(c[d - 1] - n0[d - 1] / 12 - covers)
    return n1


# --- tables --------------------------------------------------------------------

def load_bps_table(source: Union[str, Path] = DEFAULT_TABLE) -> BPSTable:
    """
    Read a BPS table from a JSON file or by shipped version name.

    Args:
        source: Path to a JSON file, or a name such as "local_p2_v1" under app/data/bps

    Raises:
        BPSDataError: If the file is missing, malformed, has non-integer invariants,
            violates the B-field parity, or fails the spin sum at a stored degree
    """
    path = Path(source)
    if not path.exists():
        path = DATA_DIR / f"{source}.json"
    if not path.exists():
        raise BPSDataError(f"no BPS table at '{source}'")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise BPSDataError(f"{path}: not valid JSON ({e})") from e
    try:
        table = BPSTable.model_validate(raw)
    except ValidationError as e:
        raise BPSDataError(f"{path}: {e.errors()[0]['msg']}") from e
    try:
        _, worst = _spin_sum_check(table)
    except BPSDataError as e:
        raise BPSDataError(f"{path}: {e}") from e
    logger.info("loaded BPS table %s v%s (%d refined, %d GV rows, spin-sum residual %.2g)",
                table.geometry, table.version, len(table.refined), len(table.gv), worst)
    return table


@lru_cache(maxsize=4)
def default_table() -> BPSTable:
    return load_bps_table(DEFAULT_TABLE)


def _chi(two_j: int, q):
    return (q ** (two_j + 1) - q ** (-two_j - 1)) / (q - 1 / q)


def check_spin_sum(table: BPSTable, degree: Sequence[int], q: complex) -> float:
    """
    |sum (-1)^{2jR}(2jR+1) chi_{jL}(q) N - sum_g n_g (q^{1/2} + q^{-1/2})^{2g}| at one degree.

    Args:
        table: BPS table
        degree: Degree vector (an empty vector gives 0)
        q: Sample point away from roots of unity
    """
    if not degree:
        return 0.0
    with _workdps():
        qq = mpmath.mpc(q)
        lhs = mpmath.fsum((-1) ** r.two_jr * (r.two_jr + 1) * _chi(r.two_jl, qq) * r.value
                          for r in table.refined_at(tuple(degree)))
        x = (mpmath.sqrt(qq) + 1 / mpmath.sqrt(qq)) ** 2
        rhs = mpmath.fsum(n * x ** g for g, n in table.gv_at(tuple(degree)).items())
        return float(abs(lhs - rhs))


def _spin_sum_check(table: BPSTable, seed: int = 0) -> Tuple[List[Tuple[int, ...]], float]:
    """
    Spin sum at 5 random q for every stored degree, refined or GV (<= 1e-10).

    Returns:
        (checked degrees, largest residual)

    Raises:
        BPSDataError: If a GV degree has no refined entries or a residual is too large
    """
    rng = np.random.default_rng(seed)
    samples = [complex(r * np.exp(1j * phi))
               for r, phi in zip(rng.uniform(0.8, 1.25, 5), rng.uniform(0.3, 2.8, 5))]
    worst = 0.0
    checked = []
    for degree in sorted(set(table.gv_degrees) | set(table.refined_degrees)):
        if not table.refined_at(degree):
            raise BPSDataError(f"GV invariants at d={list(degree)} have no refined entries")
        residual = max(check_spin_sum(table, degree, q) for q in samples)
        if residual > SPIN_SUM_TOLERANCE:
            raise BPSDataError(f"spin sum fails at d={list(degree)}: residual {residual:.3g}")
        worst = max(worst, residual)
        checked.append(degree)
    return checked, worst


def validate_bps_table(table: BPSTable, order: Optional[int] = None, seed: int = 0) -> BPSValidationReport:
    """
    Consistency checks of a local P^2 table.

    - spin sum at 5 random q for every stored degree (<= 1e-10)
    - n_0^d equals the multicover inversion of F_0 from the periods (exact)
    - n_1^d equals the inversion of the F_1 instanton series (exact)

    Raises:
        BPSDataError: On the first failed check
    """
    checked, worst = _spin_sum_check(table, seed)
    spin_degrees = [degree[0] for degree in checked]

    genus_zero, genus_one_checked = [], []
    if len(table.bfield) == 1 and table.gv_degrees:
        top = max(d[0] for d in table.gv_degrees)
        J = max(order or top, 3)
        pd = periods(max(J, get_settings().series_order))
        n0 = gv_from_gw(f0_series(J, pd).F0_instanton.coeffs[1:J + 1])
        f1_inst, _ = genus_one_series(J, pd)
        n1 = gv_genus_one_from_f1(f1_inst.coeffs[1:J + 1], n0)
        for d in range(1, min(top, J) + 1):
            stored = table.gv_at((d,))
            if Fraction(stored.get(0, 0)) != n0[d - 1]:
                raise BPSDataError(f"n_0^{d} = {stored.get(0, 0)} but the periods give {n0[d - 1]}")
            genus_zero.append(d)
            if Fraction(stored.get(1, 0)) != n1[d - 1]:
                raise BPSDataError(f"n_1^{d} = {stored.get(1, 0)} but genus one gives {n1[d - 1]}")
            genus_one_checked.append(d)
    logger.info("BPS table %s v%s validated (max spin-sum residual %.2g)", table.geometry, table.version, worst)
    return BPSValidationReport(
        geometry=table.geometry,
        version=table.version,
        spin_sum_degrees=spin_degrees,
        max_spin_residual=worst,
        genus_zero_degrees=genus_zero,
        genus_one_degrees=genus_one_checked,
    )


# --- generating functionals ----------------------------------------------------------

def _dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def _wrappings(exponent) -> range:
    """w = 1, 2, ... while e^{-w Re(d.t)} stays above the cutoff."""
    re = float(mpmath.re(exponent))
    if re <= 0:
        raise UsageError("instanton sums need Re(d.t) > 0")
    return range(1, min(_MAX_WRAPPING, int(-math.log(_TERM_CUTOFF) / re) + 1) + 1)


def _degrees_up_to(degrees: Sequence[Tuple[int, ...]], Dmax: int) -> List[Tuple[int, ...]]:
    return [d for d in degrees if sum(d) <= Dmax]


def _check_rank(table: BPSTable, tvec: Sequence) -> None:
    if len(tvec) != len(table.bfield):
        raise UsageError(f"{len(tvec)} Kahler parameters given, the table has rank {len(table.bfield)}")


def _gv_sector(table: BPSTable, degree: Tuple[int, ...], w: int, tvec, gs, guard: bool = True):
    """(1/w) sum_g n_g (2 sin(w gs/2))^{2g-2} (-1)^{w d.B} e^{-w d.t}."""
    s = 2 * mpmath.sin(w * gs / 2)
    genera = table.gv_at(degree)
    if guard and genera.get(0, 0) and abs(s) < 2 * POLE_TOLERANCE:
        raise PoleError(f"|sin(w gs/2)| < {POLE_TOLERANCE:g} at w={w}, gs={float(mpmath.re(gs)):.10g}")
    sign = (-1) ** (w * _dot(degree, table.bfield))
    total = mpmath.fsum(n * s ** (2 * g - 2) for g, n in genera.items() if n)
    return sign * total * mpmath.exp(-w * _dot(degree, tvec)) / w


def gv_free_energy(table: BPSTable, tvec: Sequence, gs: float, Dmax: int) -> float:
    """
    sum_{g, d, w} n^d_g (1/w) (2 sin(w gs/2))^{2g-2} (-1)^{w d.B} e^{-w d.t}, |d| <= Dmax.

    Example:
        local P^2, d = 1 only: -3 e^{-t} / (2 sin(gs/2))^2 + O(e^{-2t})

    Raises:
        PoleError: If |sin(w gs/2)| < 1e-8 for a contributing genus-zero term
    """
    _check_rank(table, tvec)
    with _workdps():
        total = mpmath.mpf(0)
        for degree in _degrees_up_to(table.gv_degrees, Dmax):
            for w in _wrappings(_dot(degree, tvec)):
                total += _gv_sector(table, degree, w, tvec, mpmath.mpf(gs))
        return float(total)


def _ns_weight(row, w: int, hbar):
    """sin(hbar w (2jL+1)/2) sin(hbar w (2jR+1)/2) / (2 w^2 sin^3(hbar w/2))."""
    beta = hbar * w / 2
    return (mpmath.sin(beta * (row.two_jl + 1)) * mpmath.sin(beta * (row.two_jr + 1))
            / (2 * w ** 2 * mpmath.sin(beta) ** 3))


def _ns_weight_derivative(row, w: int, hbar):
    """d/dhbar of _ns_weight."""
    beta = hbar * w / 2
    kl, kr = (row.two_jl + 1) * w / 2, (row.two_jr + 1) * w / 2
    num = mpmath.sin(kl * hbar) * mpmath.sin(kr * hbar)
    dnum = kl * mpmath.cos(kl * hbar) * mpmath.sin(kr * hbar) + kr * mpmath.sin(kl * hbar) * mpmath.cos(kr * hbar)
    den = 2 * w ** 2 * mpmath.sin(beta) ** 3
    dden = 3 * w ** 3 * mpmath.sin(beta) ** 2 * mpmath.cos(beta)
    return (dnum * den - num * dden) / den ** 2


def _check_ns_pole(w: int, hbar) -> None:
    if abs(mpmath.sin(hbar * w / 2)) < POLE_TOLERANCE:
        raise PoleError(f"|sin(hbar w/2)| < {POLE_TOLERANCE:g} at w={w}, hbar={float(hbar):.10g}")


def _ns_sign(row) -> int:
    return (-1) ** (row.two_jl + row.two_jr)


def ns_free_energy(table: BPSTable, tvec: Sequence, hbar: float, Dmax: int) -> float:
    """
    F^NS(t, hbar) = a t^3/(6 hbar) + b^NS t hbar
                    + sum (-1)^{2jL+2jR} N (sin sin)/(2 w^2 sin^3(hbar w/2)) e^{-w d t}.

    Raises:
        PoleError: If |sin(hbar w/2)| < 1e-8 for a contributing w
    """
    _check_rank(table, tvec)
    if len(tvec) != 1:
        raise UsageError("the polynomial part is implemented for one Kahler parameter")
    if hbar <= 0:
        raise UsageError("hbar must be positive")
    with _workdps():
        h = mpmath.mpf(hbar)
        t = mpmath.mpf(tvec[0])
        total = to_mp_fraction(table.cubic) * t ** 3 / (6 * h) + to_mp_fraction(table.linear_ns) * t * h
        for degree in _degrees_up_to(table.refined_degrees, Dmax):
            for w in _wrappings(_dot(degree, tvec)):
                _check_ns_pole(w, h)
                for row in table.refined_at(degree):
                    total += _ns_sign(row) * row.value * _ns_weight(row, w, h) * mpmath.exp(-w * degree[0] * t)
        return float(total)


def to_mp_fraction(x: Fraction):
    return mpmath.mpf(x.numerator) / x.denominator


# --- local P^2 grand potential -----------------------------------------------------

def perturbative_coefficients_p2(hbar: float) -> Tuple[float, float, float]:
    """(A, B, C) with C = 9/(4 pi hbar), B = pi/(2 hbar) - hbar/(16 pi)."""
    if hbar <= 0:
        raise UsageError("hbar must be positive")
    return a_constant_p2(hbar), math.pi / (2 * hbar) - hbar / (16 * math.pi), 9 / (4 * math.pi * hbar)


def a_constant_c(k: float) -> float:
    """
    A_c(k) = 2 zeta(3)/(pi^2 k) (1 - k^3/16) + (k^2/pi^2) int_0^inf x log(1 - e^{-2x}) / (e^{kx} - 1) dx.
    """
    if k <= 0:
        raise UsageError("A_c(k) needs k > 0")
    with _workdps():
        kk = mpmath.mpf(k)
        integral = mpmath.quad(
            lambda x: x / mpmath.expm1(kk * x) * mpmath.log1p(-mpmath.exp(-2 * x)),
            [0, 1, 4, mpmath.inf],
        )
        value = 2 * mpmath.zeta(3) / (mpmath.pi ** 2 * kk) * (1 - kk ** 3 / 16) + kk ** 2 / mpmath.pi ** 2 * integral
        return float(value)


@lru_cache(maxsize=64)
def a_constant_p2(hbar: float) -> float:
    """A(hbar) = [3 A_c(hbar/pi) - A_c(3 hbar/pi)] / 4."""
    if hbar <= 0:
        raise UsageError("hbar must be positive")
    return (3 * a_constant_c(hbar / math.pi) - a_constant_c(3 * hbar / math.pi)) / 4


def _wkb_instantons(table: BPSTable, t, hbar, Dmax: int, guard: bool = True):
    total = mpmath.mpf(0)
    for degree in _degrees_up_to(table.refined_degrees, Dmax):
        for w in _wrappings(degree[0] * t):
            total += _wkb_term(table, degree, w, t, hbar, guard)
    return total


def _wkb_term(table: BPSTable, degree: Tuple[int, ...], w: int, t, hbar, guard: bool = True):
    """(t/2pi) d_t + (hbar^2/2pi) d_hbar(1/hbar) applied to one NS instanton term."""
    if guard:
        _check_ns_pole(w, hbar)
    D = w * degree[0]
    total = mpmath.mpf(0)
    for row in table.refined_at(degree):
        s = _ns_weight(row, w, hbar)
        ds = _ns_weight_derivative(row, w, hbar)
        total += _ns_sign(row) * row.value * (-D * t * s + hbar * ds - s)
    return total * mpmath.exp(-D * t) / (2 * mpmath.pi)


def wkb_grand_potential(mu: float, hbar: float, table: Optional[BPSTable] = None, Dmax: int = 4) -> float:
    """
    J^WKB(mu, hbar) with the leading mirror map t = 3 mu.

    = t^3 a/(12 pi hbar) + (2 pi b/hbar + hbar b^NS/(2 pi)) t + A(hbar) + instantons.

    Raises:
        PoleError: At the poles of the NS free energy
    """
    table = table or default_table()
    with _workdps():
        h = mpmath.mpf(hbar)
        t = 3 * mpmath.mpf(mu)
        poly = (to_mp_fraction(table.cubic) * t ** 3 / (12 * mpmath.pi * h)
                + (2 * mpmath.pi * to_mp_fraction(table.linear) / h
                   + h * to_mp_fraction(table.linear_ns) / (2 * mpmath.pi)) * t)
        return float(poly + a_constant_p2(hbar) + _wkb_instantons(table, t, h, Dmax))


def worldsheet_grand_potential(mu: float, hbar: float, table: Optional[BPSTable] = None, Dmax: int = 6) -> float:
    """J^WS(mu, hbar) = F^GV(2 pi t / hbar + pi i B, 4 pi^2 / hbar) with t = 3 mu."""
    table = table or default_table()
    return gv_free_energy(table, [TWO_PI * 3 * mu / hbar], 4 * math.pi ** 2 / hbar, Dmax)


def _is_two_pi(hbar: float) -> bool:
    return math.isclose(hbar, TWO_PI, rel_tol=1e-12)


def _hat_z(mu):
    """z = -e^{-3 mu}: the classical mirror map with kappa -> -kappa."""
    z = -mpmath.exp(-3 * mu)
    if abs(z) >= mpmath.mpf(1) / 27:
        raise OutOfDiskError(f"mu = {mu} gives |z| >= 1/27")
    return z


def grand_potential_2pi_terms(t, z, pd: Optional[PeriodData] = None):
    """
    J together with dF_0/dt and d^2F_0/dt^2 at a given (t, z), all mpmath numbers.

    J = t^3/(72 pi^2) + t^2 f2/(8 pi^2) - t f1/(4 pi^2) + f0/(4 pi^2) + t/24 + h1 + h2 + A(2 pi).
    The instanton series are evaluated at z; t is taken as given, so shifted
    sheets t + 6 pi i n share one z.
    """
    pd = pd or periods()
    inst = instanton_z_series(pd)
    h = genus_one_z_series(pd)
    f0, f1, f2 = (ps_eval(inst[k], z) for k in ("f0", "f1", "f2"))
    pi2 = mpmath.pi ** 2
    J = (t ** 3 / (72 * pi2) + t ** 2 * f2 / (8 * pi2) - t * f1 / (4 * pi2) + f0 / (4 * pi2)
         + t / 24 + ps_eval(h["h1"], z) + ps_eval(h["h2"], z) + a_constant_p2(TWO_PI))
    return J, t ** 2 / 6 + f1, t / 3 + f2


def grand_potential_2pi(mu, pd: Optional[PeriodData] = None):
    """
    J(mu, 2 pi) for real or complex mu, as an mpmath number.

    Evaluated at z = -e^{-3 mu} and t = 3 mu - varpi1_tilde(z); f_i, h_i are the
    instanton z-series of F_0 (and its t-derivatives) and of F_1, F_1^NS.

    Raises:
        OutOfDiskError: If |z| >= 1/27
    """
    pd = pd or periods()
    with _workdps():
        mu = mpmath.mpmathify(mu)
        z = _hat_z(mu)
        t = 3 * mu - ps_eval(pd.varpi1_tilde, z)
        return grand_potential_2pi_terms(t, z, pd)[0]


def grand_potential_2pi_reference(mu: float, pd: Optional[PeriodData] = None, order: int = 20) -> float:
    """
    J(mu, 2 pi) from F_0(t) = t^3/18 + sum N_0^d (-1)^d e^{-d t} and the closed-form genus one.

    F_0 and its t-derivatives come from the Q-series of F_0^inst at Q = -e^{-t};
    F_1 + F_1^NS is the real part of the logarithmic closed form at z = -e^{-3 mu}.
    """
    pd = pd or periods()
    J = min(pd.order, order)
    fQ = f0_series(J, pd).F0_instanton
    with _workdps():
        mu = mpmath.mpf(mu)
        z = _hat_z(mu)
        t = 3 * mu - ps_eval(pd.varpi1_tilde, z)
        Q = -mpmath.exp(-t)
        F = t ** 3 / 18 + ps_eval(fQ, Q)
        dF = t ** 2 / 6 - ps_eval(ps_theta(fQ), Q)
        d2F = t / 3 + ps_eval(ps_theta(ps_theta(fQ)), Q)
        f1, f1ns = genus_one(float(z), pd)
        pi2 = mpmath.pi ** 2
        value = t ** 2 * d2F / (8 * pi2) - t * dF / (4 * pi2) + F / (4 * pi2) + f1 + f1ns + a_constant_p2(TWO_PI)
        return float(value)


def grand_potential_2pi_series(pd: Optional[PeriodData] = None, order: Optional[int] = None) -> Dict[int, TruncatedSeries]:
    """
    J(mu, 2 pi) - J^(p)(mu) = mu^2 c2(w) + mu c1(w) + c0(w), w = e^{-3 mu}.

    Returns:
        {0: c0, 1: c1, 2: c2} as series in w with zero constant term
    """
    pd = pd or periods()
    order = order or pd.order
    inst = instanton_z_series(pd)
    h = genus_one_z_series(pd)
    with _workdps():
        pi2 = mpmath.pi ** 2
        delta = -inst["a"]
        f0, f1, f2 = inst["f0"], inst["f1"], inst["f2"]
        c2 = (3 * delta + 9 * f2) / (8 * pi2)
        c1 = (delta * delta + 6 * delta * f2 - 6 * f1) / (8 * pi2)
        c0 = (delta * delta * delta / (72 * pi2) + delta * delta * f2 / (8 * pi2) - delta * f1 / (4 * pi2)
              + f0 / (4 * pi2) + delta / 24 + h["h1"] + h["h2"])
        # z = -w
        return {k: _alternate(c.truncate(order)) for k, c in ((0, c0), (1, c1), (2, c2))}


def _alternate(s: TruncatedSeries) -> TruncatedSeries:
    return TruncatedSeries(tuple(c if k % 2 == 0 else -c for k, c in enumerate(s.coeffs)), "w")


def grand_potential_p2(mu: float, hbar: float, Dmax: int = 6, table: Optional[BPSTable] = None) -> float:
    """
    J_{P^2}(mu, hbar).

    At hbar = 2 pi the closed form with the exact mirror map is used; for other hbar
    the sum J^WKB + J^WS with the leading mirror map t = 3 mu.

    Raises:
        OutOfDiskError: If |z| >= 1/27 on the closed-form path
        PoleError: If the generic path hits a pole of one of its pieces
    """
    if hbar <= 0:
        raise UsageError("hbar must be positive")
    if _is_two_pi(hbar):
        return float(mpmath.re(grand_potential_2pi(mu)))
    logger.debug("grand potential at hbar=%g uses the leading mirror map", hbar)
    table = table or default_table()
    return wkb_grand_potential(mu, hbar, table, min(Dmax, 4)) + worldsheet_grand_potential(mu, hbar, table, Dmax)


# --- pole cancellation ---------------------------------------------------------------

def _wkb_sector(table: BPSTable, t, hbar, D: int):
    total = mpmath.mpf(0)
    for w in _divisors(D):
        degree = (D // w,)
        if table.refined_at(degree):
            total += _wkb_term(table, degree, w, t, hbar, guard=False)
    return total


def _ws_sector(table: BPSTable, t, hbar, D: int):
    gs = 4 * mpmath.pi ** 2 / hbar
    tt = [2 * mpmath.pi * t / hbar]
    total = mpmath.mpf(0)
    for w in _divisors(D):
        degree = (D // w,)
        if table.gv_at(degree):
            total += _gv_sector(table, degree, w, tt, gs, guard=False)
    return total


def hmo_cancellation_check(hbar_target: float, d: int, t: float = 1.0,
                           epsilons: Sequence[float] = (1e-2, 1e-3, 1e-4),
                           table: Optional[BPSTable] = None) -> HMOReport:
    """
    Coefficient of e^{-d t} in J^WKB and J^WS near hbar_target.

    The worldsheet sector contributes when (hbar_target / 2 pi) d is a positive
    integer D; its exponent (2 pi / hbar) D t then collides with d t at the target.

    Returns:
        HMOReport with the pieces, their growth exponents and the combined values
    """
    table = table or default_table()
    if d < 1:
        raise UsageError("sector degree must be positive")
    ratio = hbar_target * d / TWO_PI
    D_ws = int(round(ratio)) if abs(ratio - round(ratio)) < 1e-9 and round(ratio) >= 1 else 0
    wkb, ws, combined, minus = [], [], [], []
    with _workdps():
        tt = mpmath.mpf(t)
        scale = mpmath.exp(d * tt)
        for eps in epsilons:
            pieces = []
            for h in (mpmath.mpf(hbar_target) + eps, mpmath.mpf(hbar_target) - eps):
                a = _wkb_sector(table, tt, h, d) * scale
                b = _ws_sector(table, tt, h, D_ws) * scale if D_ws else mpmath.mpf(0)
                pieces.append((a, b))
            (a, b), (am, bm) = pieces
            wkb.append(float(a))
            ws.append(float(b))
            combined.append(float(a + b))
            minus.append(float(am + bm))

    def growth(values: List[float]) -> List[float]:
        out = []
        for (e1, v1), (e2, v2) in zip(zip(epsilons, values), zip(epsilons[1:], values[1:])):
            if v1 == 0 or v2 == 0:
                out.append(0.0)
            else:
                out.append(math.log(abs(v2) / abs(v1)) / math.log(e2 / e1))
        return out

    report = HMOReport(
        hbar_target=hbar_target,
        degree=d,
        t=t,
        epsilons=list(epsilons),
        wkb=wkb,
        worldsheet=ws,
        combined=combined,
        wkb_growth=growth(wkb),
        worldsheet_growth=growth(ws),
        cauchy_differences=[abs(x - y) for x, y in zip(combined, combined[1:])],
        combined_limit=0.5 * (combined[-1] + minus[-1]),
    )
    logger.info("HMO check hbar=%g d=%d: combined limit %.12g", hbar_target, d, report.combined_limit)
    return report
