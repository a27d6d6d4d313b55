"""
Fredholm Determinant Pydantic Schemas

Schema Types:
- ThetaFrame: elliptic data of the theta representation of Xi(-kappa, 2 pi)
- TraceReport: one fermionic spectral trace Z(N) with the route that produced it
- DeterminantSample: one point of the determinant on a kappa grid
"""

from typing import Literal, Optional

from pydantic import BaseModel, Field, field_validator


class ThetaFrame(BaseModel):
    """
    Xi(-kappa, 2 pi) = exp(prefactor_log) Re(e^{i pi/8} theta_2(xi - 1/4, tau)).

    Fields:
    - E: log kappa
    - xi: real elliptic argument
    - tau: modulus, Im(tau) > 0
    - prefactor_log: J evaluated on the real sheet (always real)
    """
    E: float
    xi: float
    tau: complex
    prefactor_log: float

    @field_validator('tau')
    @classmethod
    def validate_tau(cls, v: complex) -> complex:
        if v.imag <= 0:
            raise ValueError(f"tau must lie in the upper half plane, got {v}")
        return v

    class Config:
        frozen = True


class TraceReport(BaseModel):
    """
    Fermionic spectral trace Z(N).

    Example:
        {"N": 1, "method": "airy", "value": 0.1111111111, "error_estimate": 3e-15}
    """
    N: int = Field(..., ge=1)
    method: Literal["airy", "contour", "kernel"]
    value: float
    error_estimate: float = Field(..., ge=0)
    hbar: float = Field(6.283185307179586, gt=0)
    note: Optional[str] = None


class DeterminantSample(BaseModel):
    """(kappa, Xi(-kappa, 2 pi)) with the route used."""
    kappa: float = Field(..., gt=0)
    value: float
    method: Literal["theta", "sum", "kernel"]
