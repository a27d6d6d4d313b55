"""
Toric Curve Pydantic Schemas

These schemas describe the mirror curve O_S(x, y) = sum_i c_i e^{r_i x + s_i y}
of a toric del Pezzo Calabi-Yau and the terms of its Weyl quantization.

Schema Types:
- OperatorTerm: one exponential c e^{r x + s y}
- ToricCurveSpec: vertices of the toric polygon with one positive coefficient each
- EnergyRegion: the classical region {O_S <= e^E} for a given curve
"""

from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator
from scipy.spatial import ConvexHull, QhullError

from app.exceptions import InvalidSpecError


class OperatorTerm(BaseModel):
    """
    Single term coeff * e^{r x + s y}; quantized as e^{r x + s y} with [x, y] = i hbar.

    Fields:
    - r, s: integer exponents (a vertex of the toric polygon)
    - coeff: positive coefficient
    """
    r: int = Field(..., description="Exponent of x")
    s: int = Field(..., description="Exponent of y")
    coeff: float = Field(..., gt=0, description="Positive coefficient")

    class Config:
        frozen = True


class ToricCurveSpec(BaseModel):
    """
    Mirror curve data for a toric del Pezzo Calabi-Yau.

    Fields:
    - name: label ("p2", "f0", a file stem, ...)
    - vertices: integer vectors nu^(i), one per term
    - coefficients: positive reals e^{f_i(xi)}, one per vertex
    - mass_params: the mass parameters xi_j the coefficients were built from
    - charge_matrix: optional charge vectors Q^alpha_i (metadata only)

    Example:
    {
        "name": "p2",
        "vertices": [[1, 0], [0, 1], [-1, -1]],
        "coefficients": [1.0, 1.0, 1.0]
    }
    """
    name: str = Field(..., min_length=1, max_length=100, description="Geometry label")
    vertices: List[Tuple[int, int]] = Field(..., description="Vertices nu^(i) of the toric polygon")
    coefficients: List[float] = Field(..., description="Positive coefficient per vertex")
    mass_params: List[float] = Field(default_factory=list, description="Mass parameters xi_j")
    charge_matrix: Optional[List[List[int]]] = Field(None, description="Charge vectors (metadata)")

    @field_validator('coefficients')
    @classmethod
    def validate_coefficients(cls, v: List[float]) -> List[float]:
        if any(not np.isfinite(c) or c <= 0 for c in v):
            raise InvalidSpecError(f"all coefficients must be positive and finite, got {v}")
        return v

    @model_validator(mode='after')
    def validate_polygon(self) -> "ToricCurveSpec":
        """
        At least three vertices, one coefficient per vertex, and the origin
        strictly inside the convex hull (the classical region is then compact).
        """
        if len(self.vertices) < 3:
            raise InvalidSpecError(f"{self.name}: at least 3 vertices are needed, got {len(self.vertices)}")
        if len(self.coefficients) != len(self.vertices):
            raise InvalidSpecError(
                f"{self.name}: {len(self.vertices)} vertices but {len(self.coefficients)} coefficients"
            )
        try:
            hull = ConvexHull(np.asarray(self.vertices, dtype=float))
        except QhullError as exc:
            raise InvalidSpecError(f"{self.name}: vertices do not span a polygon") from exc
        # equations rows are (normal, offset) with normal . x + offset <= 0 inside
        if np.any(hull.equations[:, -1] >= -1e-12):
            raise InvalidSpecError(f"{self.name}: origin is not strictly inside the polygon")
        return self

    class Config:
        frozen = True


class EnergyRegion(BaseModel):
    """
    The classical region R(E) = {(x, y) : O_S(x, y) <= e^E}.

    The region is nonempty iff e^E is at least the minimum of O_S over the plane;
    classical_minimum is filled in by toric_service.energy_region.
    """
    E: float = Field(..., description="Energy (log of the level)")
    spec: ToricCurveSpec
    classical_minimum: float = Field(..., gt=0, description="min of O_S over R^2")

    @property
    def is_empty(self) -> bool:
        return float(np.exp(self.E)) < self.classical_minimum


class BohrSommerfeldEstimate(BaseModel):
    """Solution of vol_0(E) = 2 pi hbar (n + 1/2) and its tropical approximation."""
    n: int = Field(..., ge=0)
    hbar: float = Field(..., gt=0)
    energy: float = Field(..., description="Root of the Bohr-Sommerfeld condition")
    tropical_energy: float = Field(..., description="sqrt(2 pi hbar (n + 1/2) / C)")
