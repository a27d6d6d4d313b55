"""
Series Service

Truncated formal power series in one variable, plus series with a polynomial
dependence on log z. All period and free-energy expansions in the lab are built
from these two types.

Coefficients are kept as exact fractions.Fraction whenever the inputs are
rational, so coefficient arithmetic is exact and deterministic. Floating
coefficients (mpmath mpf/mpc) are accepted too; evaluation always goes through
mpmath at the configured working precision.

Every binary operation truncates to the smaller order of its operands and never
extends the order. Operands must share the same variable label.

Functions:
- ps_add / ps_sub / ps_scale: linear operations
- ps_mul: truncated Cauchy product
- ps_pow: non-negative integer power
- ps_reciprocal: 1/a for a(0) != 0
- ps_exp: exp(a) for a(0) = 0
- ps_log: log(a) for a(0) = 1
- ps_log1p: log(1 + a) for a(0) = 0
- ps_compose: a(b(z)) for b(0) = 0
- ps_revert: compositional inverse by Lagrange inversion
- ps_theta / ps_integrate_theta: theta = z d/dz and its inverse
- ps_eval: Horner evaluation in mpmath
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Union

import mpmath

from app.exceptions import SingularReversionError, UsageError

Number = Union[int, Fraction, mpmath.mpf, mpmath.mpc]


def to_mp(c: Number):
    """Convert an exact or mpmath coefficient to an mpmath number."""
    if isinstance(c, Fraction):
        return mpmath.mpf(c.numerator) / c.denominator
    return mpmath.mpmathify(c)


def _is_zero(c: Number) -> bool:
    return c == 0


def _is_exact(c) -> bool:
    return isinstance(c, (int, Fraction))


def _normalize(coeffs) -> tuple:
    """All-Fraction when every coefficient is rational, otherwise all-mpmath."""
    if all(_is_exact(c) for c in coeffs):
        return tuple(Fraction(c) for c in coeffs)
    return tuple(to_mp(c) for c in coeffs)


@dataclass(frozen=True)
class TruncatedSeries:
    """
    Power series c_0 + c_1 z + ... + c_J z^J, known up to (and including) z^J.

    Attributes:
        coeffs: Coefficients c_0..c_J
        label: Name of the expansion variable ("z", "Q", ...); operations on
               series with different labels are rejected
    """
    coeffs: tuple
    label: str = "z"

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise UsageError("a truncated series needs at least one coefficient")
        object.__setattr__(self, "coeffs", _normalize(self.coeffs))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, n: int) -> Number:
        return self.coeffs[n]

    def __len__(self) -> int:
        return len(self.coeffs)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise UsageError(f"cannot extend a series of order {self.order} to {order}")
        return TruncatedSeries(self.coeffs[:order + 1], self.label)

    def relabel(self, label: str) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs, label)

    def __add__(self, other):
        if isinstance(other, TruncatedSeries):
            return ps_add(self, other)
        return ps_add(self, constant(other, self.order, self.label))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, TruncatedSeries):
            return ps_sub(self, other)
        return ps_sub(self, constant(other, self.order, self.label))

    def __rsub__(self, other):
        return ps_sub(constant(other, self.order, self.label), self)

    def __neg__(self):
        return ps_scale(self, -1)

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return ps_mul(self, other)
        return ps_scale(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return ps_mul(self, ps_reciprocal(other))
        if isinstance(other, int):
            other = Fraction(other)
        return ps_scale(self, 1 / other)

    def __repr__(self):
        shown = ", ".join(str(c) for c in self.coeffs[:6])
        tail = ", ..." if self.order > 5 else ""
        return f"<TruncatedSeries(label={self.label}, order={self.order}, coeffs=[{shown}{tail}])>"


def series(coeffs: Iterable[Number], label: str = "z") -> TruncatedSeries:
    """Build a series, turning ints into Fractions so arithmetic stays exact."""
    return TruncatedSeries(
        tuple(Fraction(c) if isinstance(c, int) else c for c in coeffs), label
    )


def constant(c: Number, order: int, label: str = "z") -> TruncatedSeries:
    if isinstance(c, int):
        c = Fraction(c)
    return TruncatedSeries((c,) + (Fraction(0),) * order, label)


def variable(order: int, label: str = "z") -> TruncatedSeries:
    """The series z itself, truncated at the given order."""
    coeffs = [Fraction(0)] * (order + 1)
    if order >= 1:
        coeffs[1] = Fraction(1)
    return TruncatedSeries(tuple(coeffs), label)


def _check_labels(a: TruncatedSeries, b: TruncatedSeries) -> None:
    if a.label != b.label:
        raise UsageError(f"series variable mismatch: '{a.label}' vs '{b.label}'")


def _is_exact_series(a: TruncatedSeries) -> bool:
    return isinstance(a.coeffs[0], Fraction)


def _coerce_pair(a: TruncatedSeries, b: TruncatedSeries):
    """Coefficient tuples of a and b in a common kind (Fraction meets mpmath only via mpmath)."""
    if _is_exact_series(a) == _is_exact_series(b):
        return a.coeffs, b.coeffs
    return tuple(to_mp(c) for c in a.coeffs), tuple(to_mp(c) for c in b.coeffs)


def _coerce_scalar(a: TruncatedSeries, c: Number):
    if _is_exact(c):
        c = Fraction(c)
        if _is_exact_series(a):
            return a.coeffs, c
        return a.coeffs, to_mp(c)
    return tuple(to_mp(x) for x in a.coeffs), mpmath.mpmathify(c)


def ps_add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_labels(a, b)
    order = min(a.order, b.order)
    ac, bc = _coerce_pair(a, b)
    return TruncatedSeries(tuple(ac[n] + bc[n] for n in range(order + 1)), a.label)


def ps_sub(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    _check_labels(a, b)
    order = min(a.order, b.order)
    ac, bc = _coerce_pair(a, b)
    return TruncatedSeries(tuple(ac[n] - bc[n] for n in range(order + 1)), a.label)


def ps_scale(a: TruncatedSeries, c: Number) -> TruncatedSeries:
    coeffs, c = _coerce_scalar(a, c)
    return TruncatedSeries(tuple(c * x for x in coeffs), a.label)


def ps_mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """
    Truncated Cauchy product.

    Args:
        a: First factor
        b: Second factor (same label as a)

    Returns:
        a*b truncated to min(order(a), order(b))

    Raises:
        UsageError: If the variable labels differ
    """
    _check_labels(a, b)
    order = min(a.order, b.order)
    # skip zero coefficients: most period series start at z^1
    ac, bc = _coerce_pair(a, b)
    nz_a = [(i, c) for i, c in enumerate(ac[:order + 1]) if not _is_zero(c)]
    out: List[Number] = [0] * (order + 1)
    for j in range(order + 1):
        bj = bc[j]
        if _is_zero(bj):
            continue
        for i, ai in nz_a:
            if i + j > order:
                break
            out[i + j] += ai * bj
    return TruncatedSeries(tuple(out), a.label)


def ps_pow(a: TruncatedSeries, n: int) -> TruncatedSeries:
    if n < 0:
        raise UsageError("ps_pow only supports non-negative powers; use ps_reciprocal")
    result = constant(1, a.order, a.label)
    base = a
    while n:
        if n & 1:
            result = ps_mul(result, base)
        n >>= 1
        if n:
            base = ps_mul(base, base)
    return result


def ps_reciprocal(a: TruncatedSeries) -> TruncatedSeries:
    """1/a, requires a(0) != 0."""
    a0 = a[0]
    if _is_zero(a0):
        raise UsageError("reciprocal of a series with zero constant term")
    inv0 = 1 / a0
    out: List[Number] = [inv0]
    for n in range(1, a.order + 1):
        s = sum((a[k] * out[n - k] for k in range(1, n + 1)), 0)
        out.append(-s * inv0)
    return TruncatedSeries(tuple(out), a.label)


def ps_exp(a: TruncatedSeries) -> TruncatedSeries:
    """
    exp(a) for a series without constant term.

    Uses n*b_n = sum_{k=1}^{n} k*a_k*b_{n-k}, b_0 = 1.

    Raises:
        UsageError: If a(0) != 0
    """
    if not _is_zero(a[0]):
        raise UsageError("ps_exp needs a series with zero constant term")
    out: List[Number] = [Fraction(1) if _is_exact_series(a) else mpmath.mpf(1)]
    for n in range(1, a.order + 1):
        s = sum((k * a[k] * out[n - k] for k in range(1, n + 1)), 0)
        out.append(s / n)
    return TruncatedSeries(tuple(out), a.label)


def ps_log(a: TruncatedSeries) -> TruncatedSeries:
    """log(a) for a(0) = 1, from theta(log a) = theta(a)/a."""
    if a[0] != 1:
        raise UsageError("ps_log needs a series with constant term 1")
    return ps_integrate_theta(ps_mul(ps_theta(a), ps_reciprocal(a)))


def ps_log1p(a: TruncatedSeries) -> TruncatedSeries:
    """log(1 + a) for a(0) = 0."""
    if not _is_zero(a[0]):
        raise UsageError("ps_log1p needs a series with zero constant term")
    return ps_log(ps_add(constant(1, a.order, a.label), a))


def ps_theta(a: TruncatedSeries) -> TruncatedSeries:
    """theta = z d/dz."""
    return TruncatedSeries(tuple(n * c for n, c in enumerate(a.coeffs)), a.label)


def ps_integrate_theta(a: TruncatedSeries) -> TruncatedSeries:
    """Inverse of theta on series with zero constant term (integration constant 0)."""
    if not _is_zero(a[0]):
        raise UsageError("theta^-1 is only defined on series with zero constant term")
    return TruncatedSeries(
        (Fraction(0),) + tuple(a[n] / n for n in range(1, a.order + 1)), a.label
    )


def ps_compose(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    """
    a(b(w)) as a series in b's variable.

    Args:
        a: Outer series
        b: Inner series with b(0) = 0

    Returns:
        Composition truncated to min(order(a), order(b)), labelled like b
    """
    if not _is_zero(b[0]):
        raise UsageError("ps_compose needs an inner series with zero constant term")
    order = min(a.order, b.order)
    inner = b.truncate(order)
    result = constant(a[order], order, b.label)
    for k in range(order - 1, -1, -1):
        result = ps_mul(result, inner) + constant(a[k], order, b.label)
    return result


def ps_revert(a: TruncatedSeries, label: str = None) -> TruncatedSeries:
    """
    Compositional inverse of a(z) = a_1 z + a_2 z^2 + ...

    Lagrange inversion: if Q = a(z) then z = sum_n b_n Q^n with
    b_n = (1/n) [z^{n-1}] (z/a(z))^n.

    Args:
        a: Series with a(0) = 0 and a'(0) != 0
        label: Label of the new variable (defaults to a's label)

    Returns:
        The inverse series, same order as a

    Raises:
        UsageError: If a(0) != 0
        SingularReversionError: If a'(0) == 0
    """
    if not _is_zero(a[0]):
        raise UsageError("ps_revert needs a series with zero constant term")
    if a.order < 1 or _is_zero(a[1]):
        raise SingularReversionError("ps_revert: linear coefficient vanishes")
    order = a.order
    # a(z)/z = a_1 + a_2 z + ..., known to order J-1
    quotient = TruncatedSeries(a.coeffs[1:], a.label)
    h = ps_reciprocal(quotient)
    out: List[Number] = [Fraction(0)]
    power = constant(1, h.order, a.label)
    for n in range(1, order + 1):
        power = ps_mul(power, h)
        out.append(power[n - 1] / n)
    return TruncatedSeries(tuple(out), label or a.label)


def ps_eval(a: TruncatedSeries, z) -> Union[mpmath.mpf, mpmath.mpc]:
    """Horner evaluation at z in mpmath arithmetic."""
    zz = mpmath.mpmathify(z)
    acc = mpmath.mpf(0)
    for c in reversed(a.coeffs):
        acc = acc * zz + to_mp(c)
    return acc


def ps_to_float_list(a: TruncatedSeries) -> List[float]:
    return [float(to_mp(c)) if not isinstance(c, mpmath.mpc) else complex(c) for c in a.coeffs]


@dataclass(frozen=True)
class LogSeries:
    """
    sum_k s_k(z) (log z)^k for k in {0, 1, 2}.

    Periods of local del Pezzo geometries carry at most (log z)^2, so the sector
    index is capped at 2. Missing sectors are zero.
    """
    sectors: Dict[int, TruncatedSeries] = field(default_factory=dict)

    def __post_init__(self):
        for k in self.sectors:
            if k not in (0, 1, 2):
                raise UsageError(f"log sector {k} outside 0..2")
        labels = {s.label for s in self.sectors.values()}
        if len(labels) > 1:
            raise UsageError(f"log sectors use different variables: {sorted(labels)}")

    @property
    def order(self) -> int:
        return min(s.order for s in self.sectors.values())

    def sector(self, k: int) -> TruncatedSeries:
        if k in self.sectors:
            return self.sectors[k]
        some = next(iter(self.sectors.values()))
        return constant(0, some.order, some.label)

    def theta(self) -> "LogSeries":
        """theta(s_k L^k) = theta(s_k) L^k + k s_k L^(k-1), L = log z."""
        out: Dict[int, TruncatedSeries] = {}
        for k, s in self.sectors.items():
            term = ps_theta(s)
            out[k] = out[k] + term if k in out else term
            if k > 0:
                shifted = ps_scale(s, k)
                out[k - 1] = out[k - 1] + shifted if k - 1 in out else shifted
        return LogSeries(out)

    def evaluate(self, z, log_z=None):
        """
        Evaluate at z with the given branch of log z.

        Args:
            z: Point inside the disk of convergence
            log_z: Value used for log z (principal log when omitted)
        """
        zz = mpmath.mpmathify(z)
        L = mpmath.log(zz) if log_z is None else mpmath.mpmathify(log_z)
        return mpmath.fsum(ps_eval(s, zz) * L ** k for k, s in self.sectors.items())


def log_series(sectors: Sequence[TruncatedSeries]) -> LogSeries:
    """Build a LogSeries from [s_0, s_1, ...]."""
    return LogSeries({k: s for k, s in enumerate(sectors)})


def ps_times_variable(a: TruncatedSeries) -> TruncatedSeries:
    """z * a(z), keeping the order of a (the top coefficient drops out)."""
    return TruncatedSeries((Fraction(0),) + a.coeffs[:-1], a.label)


def ls_add(x: LogSeries, y: LogSeries) -> LogSeries:
    keys = set(x.sectors) | set(y.sectors)
    return LogSeries({k: x.sector(k) + y.sector(k) for k in keys})


def ls_scale(x: LogSeries, c: Number) -> LogSeries:
    return LogSeries({k: ps_scale(s, c) for k, s in x.sectors.items()})


def ls_times_variable(x: LogSeries) -> LogSeries:
    return LogSeries({k: ps_times_variable(s) for k, s in x.sectors.items()})


def ls_theta_power(x: LogSeries, n: int) -> LogSeries:
    for _ in range(n):
        x = x.theta()
    return x
