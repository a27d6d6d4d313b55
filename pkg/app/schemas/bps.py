"""
BPS and Grand Potential Pydantic Schemas

Schema Types:
- RefinedInvariant: one refined BPS number N^d_{jL,jR}
- GVInvariant: one Gopakumar-Vafa number n^d_g
- BPSTable: a versioned table of invariants together with the polynomial data
- BPSValidationReport: what the load-time checks verified
- AiryCoefficient: one entry a_{l,n} of the large-mu expansion of e^J
- GrandPotentialModel: A, B, C and the a_{l,n} table at fixed hbar
- HMOReport: pole cancellation between the WKB and worldsheet pieces
"""

import math
from fractions import Fraction
from typing import Dict, List, Tuple

from pydantic import BaseModel, Field, StrictInt, field_validator, model_validator


def _fraction(v) -> Fraction:
    if isinstance(v, float):
        raise ValueError("polynomial constants are exact: give them as integers or 'p/q' strings")
    return Fraction(v)


class RefinedInvariant(BaseModel):
    """
    Refined BPS invariant.

    Spins are stored doubled so that every field is an integer.

    Example:
        {"degree": [1], "two_jl": 0, "two_jr": 2, "value": 1}
    """
    degree: List[StrictInt] = Field(..., min_length=1, description="Degree vector d")
    two_jl: StrictInt = Field(..., ge=0, description="2 j_L")
    two_jr: StrictInt = Field(..., ge=0, description="2 j_R")
    value: StrictInt = Field(..., description="N^d_{jL,jR}")

    class Config:
        frozen = True


class GVInvariant(BaseModel):
    """
    Gopakumar-Vafa invariant n^d_g.

    Example:
        {"genus": 0, "degree": [2], "value": -6}
    """
    genus: StrictInt = Field(..., ge=0)
    degree: List[StrictInt] = Field(..., min_length=1)
    value: StrictInt

    class Config:
        frozen = True


class BPSTable(BaseModel):
    """
    Versioned BPS data of one geometry.

    Fields:
    - geometry, version: identify the data file
    - bfield: the B-field vector; every nonzero refined entry obeys
      (-1)^{2jL + 2jR + 1} = (-1)^{B.d}
    - cubic, linear, linear_ns: a, b, b^NS of the polynomial parts
      F_0 = a t^3/6 + ..., F_1 = b t + ..., F_1^NS = b^NS t + ... (one modulus)
    - refined, gv: the invariants; absent entries are zero
    """
    geometry: str = Field(..., min_length=1)
    version: str = Field(..., min_length=1)
    bfield: List[StrictInt] = Field(..., min_length=1)
    cubic: Fraction
    linear: Fraction
    linear_ns: Fraction
    refined: List[RefinedInvariant] = Field(default_factory=list)
    gv: List[GVInvariant] = Field(default_factory=list)

    @field_validator('cubic', 'linear', 'linear_ns', mode='before')
    @classmethod
    def parse_fraction(cls, v):
        return _fraction(v)

    @model_validator(mode='after')
    def check_consistency(self) -> "BPSTable":
        rank = len(self.bfield)
        for row in list(self.refined) + list(self.gv):
            if len(row.degree) != rank:
                raise ValueError(f"degree {row.degree} does not match the B-field rank {rank}")
            if any(d < 0 for d in row.degree) or not any(row.degree):
                raise ValueError(f"degree {row.degree} must be non-negative and nonzero")
        for row in self.refined:
            if row.value == 0:
                continue
            bd = sum(b * d for b, d in zip(self.bfield, row.degree))
            if (row.two_jl + row.two_jr + 1) % 2 != bd % 2:
                raise ValueError(
                    f"refined entry d={row.degree} (2jL={row.two_jl}, 2jR={row.two_jr}) "
                    f"violates the B-field parity"
                )
        return self

    def refined_at(self, degree: Tuple[int, ...]) -> List[RefinedInvariant]:
        return [r for r in self.refined if tuple(r.degree) == tuple(degree)]

    def gv_at(self, degree: Tuple[int, ...]) -> Dict[int, int]:
        """genus -> n^d_g for one degree."""
        return {r.genus: r.value for r in self.gv if tuple(r.degree) == tuple(degree)}

    @property
    def refined_degrees(self) -> List[Tuple[int, ...]]:
        return sorted({tuple(r.degree) for r in self.refined})

    @property
    def gv_degrees(self) -> List[Tuple[int, ...]]:
        return sorted({tuple(r.degree) for r in self.gv})

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class BPSValidationReport(BaseModel):
    """Result of validate_bps_table."""
    geometry: str
    version: str
    spin_sum_degrees: List[int]
    max_spin_residual: float = Field(..., ge=0)
    genus_zero_degrees: List[int]
    genus_one_degrees: List[int]


class AiryCoefficient(BaseModel):
    """a_{l,n}: coefficient of mu^n e^{-l mu} in e^{J - J^(p)}."""
    l: float = Field(..., gt=0)
    n: int = Field(..., ge=0)
    value: float


class GrandPotentialModel(BaseModel):
    """
    Large-mu data of the grand potential at fixed hbar.

    J^(p)(mu) = C mu^3 / 3 + B mu + A, e^J = e^{J^(p)} (1 + sum a_{l,n} mu^n e^{-l mu}).

    Fields:
    - hbar, A, Bcoef, Ccoef
    - instanton_coeffs: the a_{l,n} with l > 0; l = 3p + (6 pi/hbar) q
    - geometry
    """
    hbar: float = Field(..., gt=0)
    A: float
    Bcoef: float
    Ccoef: float = Field(..., gt=0)
    instanton_coeffs: List[AiryCoefficient] = Field(default_factory=list)
    geometry: str = "local_p2"

    @model_validator(mode='after')
    def check_exponents(self) -> "GrandPotentialModel":
        step = 6 * math.pi / self.hbar
        for entry in self.instanton_coeffs:
            remainders = [entry.l - step * q for q in range(int(entry.l / step) + 1)]
            if not any(r > -1e-9 and abs(r / 3 - round(r / 3)) < 1e-9 for r in remainders):
                raise ValueError(f"exponent l={entry.l} is not of the form 3p + (6 pi/hbar) q")
        return self

    @property
    def max_l(self) -> float:
        return max((e.l for e in self.instanton_coeffs), default=0.0)


class HMOReport(BaseModel):
    """
    WKB and worldsheet contributions to one instanton sector near a pole of hbar.

    Values are coefficients of e^{-d t} evaluated at hbar_target + epsilon.
    """
    hbar_target: float
    degree: int
    t: float
    epsilons: List[float]
    wkb: List[float]
    worldsheet: List[float]
    combined: List[float]
    wkb_growth: List[float] = Field(..., description="d log|WKB| / d log eps between successive eps")
    worldsheet_growth: List[float]
    cauchy_differences: List[float] = Field(..., description="|combined_k - combined_{k+1}|")
    combined_limit: float = Field(..., description="Symmetric (+eps/-eps) average at the smallest eps")
