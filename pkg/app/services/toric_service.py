"""
Toric Geometry Service

Mirror curves of toric del Pezzo geometries as classical functions on the
phase space R^2, and their semiclassical spectrum.

The curve O_S(x, y) = sum_i c_i e^{r_i x + s_i y} is convex (log-sum-exp of
linear forms), so every horizontal section of the region {O_S <= e^E} is a
single interval. Region areas are computed by integrating the chord length in
x with scipy.integrate.quad; chord endpoints come from scipy.optimize.brentq.

Functions:
- preset: catalog of named geometries (p2, f0, f1, f2, b2, b3, p1mn)
- load_geometry_file: ToricCurveSpec from a JSON file
- build_operator_terms: one OperatorTerm per vertex
- evaluate_curve: O_S(x, y)
- curve_minimum: minimum of O_S over R^2
- energy_region: EnergyRegion for a given E
- tropical_polygon / tropical_volume_coeff: the E -> infinity region and its area C
- classical_region_volume: area of {O_S <= e^E}
- bohr_sommerfeld_energy: root of vol_0(E) = 2 pi hbar (n + 1/2)
"""

import json
import logging
from pathlib import Path
from typing import List, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq, minimize, minimize_scalar
from scipy.spatial import ConvexHull, HalfspaceIntersection, QhullError
from scipy.special import logsumexp

from app.exceptions import InvalidSpecError
from app.schemas.curve import BohrSommerfeldEstimate, EnergyRegion, OperatorTerm, ToricCurveSpec

logger = logging.getLogger(__name__)


# Catalog: vertex list and coefficient pattern in the mass parameters
def _p2() -> ToricCurveSpec:
    return ToricCurveSpec(name="p2", vertices=[(1, 0), (0, 1), (-1, -1)], coefficients=[1.0, 1.0, 1.0])


def _f0(xi: float = 1.0) -> ToricCurveSpec:
    return ToricCurveSpec(
        name="f0", vertices=[(1, 0), (-1, 0), (0, 1), (0, -1)],
        coefficients=[1.0, xi, 1.0, 1.0], mass_params=[xi],
    )


def _f1(xi: float = 1.0) -> ToricCurveSpec:
    return ToricCurveSpec(
        name="f1", vertices=[(1, 0), (0, 1), (-1, -1), (-1, 0)],
        coefficients=[1.0, 1.0, 1.0, xi], mass_params=[xi],
    )


def _f2(xi: float = 1.0) -> ToricCurveSpec:
    return ToricCurveSpec(
        name="f2", vertices=[(1, 0), (0, 1), (-2, -1), (-1, 0)],
        coefficients=[1.0, 1.0, 1.0, xi], mass_params=[xi],
    )


def _b2(xi1: float = 1.0, xi2: float = 1.0) -> ToricCurveSpec:
    return ToricCurveSpec(
        name="b2", vertices=[(1, 0), (0, 1), (-1, -1), (0, -1), (-1, 0)],
        coefficients=[1.0, 1.0, 1.0, xi1, xi2], mass_params=[xi1, xi2],
    )


def _b3(xi1: float = 1.0, xi2: float = 1.0, xi3: float = 1.0) -> ToricCurveSpec:
    return ToricCurveSpec(
        name="b3", vertices=[(1, 0), (0, 1), (-1, -1), (-1, 0), (0, -1), (1, 1)],
        coefficients=[1.0, 1.0, 1.0, xi1, xi2, xi3], mass_params=[xi1, xi2, xi3],
    )


def _p1mn(m: int = 1, n: int = 1) -> ToricCurveSpec:
    if int(m) != m or int(n) != n or m <= 0 or n <= 0:
        raise InvalidSpecError(f"p1mn needs positive integers m, n (got m={m}, n={n})")
    return ToricCurveSpec(
        name=f"p1{int(m)}{int(n)}", vertices=[(1, 0), (0, 1), (-int(m), -int(n))],
        coefficients=[1.0, 1.0, 1.0],
    )


PRESETS = {
    "p2": _p2,
    "f0": _f0,
    "f1": _f1,
    "f2": _f2,
    "b2": _b2,
    "b3": _b3,
    "p1mn": _p1mn,
}


def preset(name: str, **params) -> ToricCurveSpec:
    """
    Named geometry from the catalog.

    Args:
        name: One of p2, f0, f1, f2, b2, b3, p1mn
        **params: Mass parameters (xi, xi1, xi2, xi3) or m, n for p1mn

    Raises:
        InvalidSpecError: Unknown name or bad parameters
    """
    key = name.lower()
    if key not in PRESETS:
        raise InvalidSpecError(f"unknown geometry '{name}' (known: {', '.join(sorted(PRESETS))})")
    try:
        return PRESETS[key](**params)
    except TypeError as exc:
        raise InvalidSpecError(f"bad parameters for '{name}': {exc}") from exc


def load_geometry_file(path) -> ToricCurveSpec:
    """
    Read a geometry JSON file:
    {"name": str, "vertices": [[int, int], ...], "coefficients": [float, ...],
     "mass_params": [float, ...] (optional)}
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidSpecError(f"cannot read geometry file {path}: {exc}") from exc
    raw.setdefault("name", path.stem)
    return ToricCurveSpec.model_validate(raw)


def build_operator_terms(spec: ToricCurveSpec) -> List[OperatorTerm]:
    """One term per vertex: (r, s) = nu^(i), coeff = c_i."""
    return [OperatorTerm(r=r, s=s, coeff=c) for (r, s), c in zip(spec.vertices, spec.coefficients)]


def _arrays(spec: ToricCurveSpec) -> Tuple[np.ndarray, np.ndarray]:
    return np.asarray(spec.vertices, dtype=float), np.log(np.asarray(spec.coefficients, dtype=float))


def log_curve(spec: ToricCurveSpec, x: float, y: float) -> float:
    """log O_S(x, y), computed with logsumexp."""
    nu, logc = _arrays(spec)
    return float(logsumexp(logc + nu[:, 0] * x + nu[:, 1] * y))


def evaluate_curve(spec: ToricCurveSpec, x: float, y: float) -> float:
    return float(np.exp(log_curve(spec, x, y)))


def curve_minimum(spec: ToricCurveSpec) -> Tuple[float, float, float]:
    """
    Minimum of O_S over R^2.

    Returns:
        (min value, x at minimum, y at minimum)
    """
    nu, logc = _arrays(spec)

    def fun(v):
        terms = logc + nu @ v
        lse = logsumexp(terms)
        weights = np.exp(terms - lse)
        return lse, weights @ nu

    res = minimize(fun, np.zeros(2), jac=True, method="BFGS", options={"gtol": 1e-12})
    return float(np.exp(res.fun)), float(res.x[0]), float(res.x[1])


def energy_region(spec: ToricCurveSpec, E: float) -> EnergyRegion:
    return EnergyRegion(E=E, spec=spec, classical_minimum=curve_minimum(spec)[0])


def tropical_polygon(spec: ToricCurveSpec) -> np.ndarray:
    """
    Vertices (counterclockwise) of {(x, y) : nu^(i) . (x, y) <= 1}.

    Raises:
        InvalidSpecError: If the intersection is unbounded
    """
    nu, _ = _arrays(spec)
    halfspaces = np.column_stack([nu, -np.ones(len(nu))])
    try:
        hs = HalfspaceIntersection(halfspaces, np.zeros(2))
        hull = ConvexHull(hs.intersections)
    except QhullError as exc:
        raise InvalidSpecError(f"{spec.name}: tropical region is unbounded") from exc
    points = hs.intersections[hull.vertices]
    if not np.all(np.isfinite(points)):
        raise InvalidSpecError(f"{spec.name}: tropical region is unbounded")
    return points


def _shoelace(points: np.ndarray) -> float:
    x, y = points[:, 0], points[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y)))


def tropical_volume_coeff(spec: ToricCurveSpec) -> float:
    """
    C in vol_0(E) ~ C E^2: the area of the tropical polygon at E = 1.

    Examples:
        p2 -> 9/2, f0 -> 4
    """
    return _shoelace(tropical_polygon(spec))


def _chord(nu: np.ndarray, logc: np.ndarray, x: float, E: float, scale: float):
    """y-interval of {O_S(x, .) <= e^E}; None if the section is empty."""
    def g(y):
        return float(logsumexp(logc + nu[:, 0] * x + nu[:, 1] * y)) - E

    res = minimize_scalar(g, bracket=(-1.0, 1.0))
    if res.fun >= 0:
        return None
    y0 = float(res.x)
    ends = []
    for direction in (-1.0, 1.0):
        step = scale
        while g(y0 + direction * step) < 0:
            step *= 2.0
        a, b = sorted((y0, y0 + direction * step))
        ends.append(brentq(g, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps))
    return ends[0], ends[1]


def _section_minimum(nu: np.ndarray, logc: np.ndarray, x: float) -> float:
    res = minimize_scalar(lambda y: float(logsumexp(logc + nu[:, 0] * x + nu[:, 1] * y)), bracket=(-1.0, 1.0))
    return float(res.fun)


def classical_region_volume(spec: ToricCurveSpec, E: float) -> float:
    """
    Area of R(E) = {O_S <= e^E}.

    The chord length in y is integrated over the x-range where the section is
    nonempty; the x-range endpoints are roots of the (convex) section minimum.

    Args:
        spec: Curve
        E: Energy

    Returns:
        Area, 0 for an empty region
    """
    min_value, x_star, _ = curve_minimum(spec)
    if E <= np.log(min_value):
        return 0.0
    nu, logc = _arrays(spec)
    scale = max(1.0, abs(E))

    def h(x):
        return _section_minimum(nu, logc, x) - E

    x_ends = []
    for direction in (-1.0, 1.0):
        step = scale
        while h(x_star + direction * step) < 0:
            step *= 2.0
        a, b = sorted((x_star, x_star + direction * step))
        x_ends.append(brentq(h, a, b, xtol=1e-13))

    def length(x):
        chord = _chord(nu, logc, x, E, scale)
        return 0.0 if chord is None else chord[1] - chord[0]

    area, err = quad(length, x_ends[0], x_ends[1], epsabs=0.0, epsrel=1e-8, limit=400)
    logger.debug("region area %s at E=%.6g: %.12g (+/- %.2g)", spec.name, E, area, err)
    return float(area)


def bohr_sommerfeld_energy(spec: ToricCurveSpec, hbar: float, n: int) -> BohrSommerfeldEstimate:
    """
    Bohr-Sommerfeld energy vol_0(E) = 2 pi hbar (n + 1/2).

    Args:
        spec: Curve
        hbar: Planck constant
        n: Level index

    Returns:
        Root of the condition (bracketed root finding on classical_region_volume)
        together with the tropical estimate sqrt(2 pi hbar (n + 1/2) / C)
    """
    C = tropical_volume_coeff(spec)
    target = 2 * np.pi * hbar * (n + 0.5)
    tropical = float(np.sqrt(target / C))
    lo = float(np.log(curve_minimum(spec)[0]))
    hi = max(lo + 1.0, tropical + 1.0)
    while classical_region_volume(spec, hi) < target:
        hi += max(1.0, 0.5 * hi)
    root = brentq(lambda e: classical_region_volume(spec, e) - target, lo, hi, xtol=1e-10)
    return BohrSommerfeldEstimate(n=n, hbar=hbar, energy=float(root), tropical_energy=tropical)
