"""
Period Pydantic Schemas

Schema Types:
- PeriodData: the power series parts of the local P^2 periods
- FreeEnergyData: genus-zero instanton series and genus-one evaluators
- ConifoldValue: the Kahler parameter at the conifold point, two ways
"""

from typing import Callable

from pydantic import BaseModel, Field

from app.services.series_service import TruncatedSeries


class PeriodData(BaseModel):
    """
    Series parts of the Picard-Fuchs periods of local P^2.

    varpi_1 = log z + varpi1_tilde(z)
    varpi_2 = log^2 z + 2 varpi1_tilde(z) log z + varpi2_tilde(z)

    Fields:
    - varpi1_tilde: exact rational series, coefficient j = 3 (3j-1)!/(j!)^3 (-1)^j
    - varpi2_tilde: exact rational series with the digamma differences
    - order: truncation order J
    """
    varpi1_tilde: TruncatedSeries
    varpi2_tilde: TruncatedSeries
    order: int = Field(..., ge=1, description="Truncation order J")

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class FreeEnergyData(BaseModel):
    """
    Genus-zero and genus-one free energies of local P^2.

    Fields:
    - F0_instanton: F_0 - t^3/18 as a series in Q = e^{-t}
    - F0_instanton_z: the same function as a series in z
    - F1_of_z, F1NS_of_z: closed-form genus-one evaluators in z
    - cubic_coefficient: 1/18
    """
    F0_instanton: TruncatedSeries
    F0_instanton_z: TruncatedSeries
    F1_of_z: Callable[[float], float]
    F1NS_of_z: Callable[[float], float]
    cubic_coefficient: float = Field(1.0 / 18.0, description="Coefficient of t^3")

    class Config:
        arbitrary_types_allowed = True
        frozen = True


class ConifoldValue(BaseModel):
    """t_c from the accelerated mirror map and from the Bloch-Wigner function."""
    series_value: float = Field(..., description="-log(1/27) - varpi1_tilde(-1/27)")
    series_error: float = Field(..., ge=0, description="Acceleration error estimate")
    bloch_wigner_value: float = Field(..., description="(9/pi) D(e^{i pi/3})")

    @property
    def discrepancy(self) -> float:
        return abs(self.series_value - self.bloch_wigner_value)
