"""
Quantization Pydantic Schemas

Schema Types:
- QuantizationConfig: how a curve is turned into a truncated matrix
- SpectrumResult: the extrapolated low-lying spectrum E_0 < E_1 < ...
"""

import math
from typing import List, Literal, Optional, Union

from pydantic import BaseModel, Field, field_validator, model_validator

DEFAULT_LADDER = [200, 300, 400]


class QuantizationConfig(BaseModel):
    """
    Settings of the harmonic-oscillator truncation.

    Fields:
    - hbar: Planck constant, [x, y] = i hbar
    - basis_size: smallest matrix size M of a geometric ladder M, 2M, 4M, ...
    - oscillator_scale: sigma of the oscillator basis; None picks it variationally
    - extrapolation_levels: number of sizes in the geometric ladder
    - ladder: explicit list of matrix sizes, overrides basis_size/extrapolation_levels
    - working_precision: "auto" (double while the truncation stays well conditioned,
      mpmath digits beyond), "double" (numpy/scipy) or a number of decimal digits
    - tolerance: target error of the extrapolated levels; larger estimates warn
    - method: "oscillator", "kernel" (exact kernel, three-term curves only) or "auto"

    Without ladder, basis_size or extrapolation_levels the sizes are 200, 300, 400.
    """
    hbar: float = Field(..., gt=0, description="Planck constant")
    basis_size: int = Field(DEFAULT_LADDER[0], ge=20, description="Matrix size M")
    oscillator_scale: Optional[float] = Field(None, gt=0, description="Oscillator scale sigma")
    extrapolation_levels: int = Field(len(DEFAULT_LADDER), ge=1, le=6, description="Number of sizes in the ladder")
    ladder: Optional[List[int]] = Field(None, description="Explicit matrix sizes")
    working_precision: Union[Literal["auto", "double"], int] = Field(
        "auto", description="'auto', 'double' or decimal digits")
    tolerance: float = Field(1e-7, gt=0, description="Target error of the extrapolated levels")
    method: Literal["auto", "oscillator", "kernel"] = Field("auto", description="Spectrum route")

    @field_validator('ladder')
    @classmethod
    def validate_ladder(cls, v: Optional[List[int]]) -> Optional[List[int]]:
        if v is None:
            return v
        if not v or any(m < 2 for m in v) or sorted(set(v)) != list(v):
            raise ValueError('ladder must be a strictly increasing list of sizes >= 2')
        return v

    @field_validator('working_precision')
    @classmethod
    def validate_precision(cls, v):
        if isinstance(v, int) and v < 16:
            raise ValueError('working_precision must be "auto", "double" or at least 16 digits')
        return v

    @property
    def sizes(self) -> List[int]:
        if self.ladder is not None:
            return list(self.ladder)
        if not {"basis_size", "extrapolation_levels"} & self.model_fields_set:
            return list(DEFAULT_LADDER)
        return [self.basis_size * 2 ** k for k in range(self.extrapolation_levels)]

    @property
    def sigma(self) -> float:
        """Oscillator scale; sqrt(hbar) when not set explicitly."""
        return self.oscillator_scale if self.oscillator_scale is not None else math.sqrt(self.hbar)

    class Config:
        frozen = True


class SpectrumResult(BaseModel):
    """
    Low-lying spectrum e^{E_n} of a quantized mirror curve.

    Fields:
    - energies: E_0 < E_1 < ... (strictly increasing, finite)
    - errors: per-level error estimate (difference of the last two extrapolants)
    - sizes: matrix or grid sizes used
    - method: "oscillator" or "kernel"
    - config: echo of the QuantizationConfig
    """
    energies: List[float] = Field(..., min_length=1)
    errors: List[float]
    sizes: List[int]
    method: str
    config: QuantizationConfig

    @model_validator(mode='after')
    def check_levels(self) -> "SpectrumResult":
        if len(self.errors) != len(self.energies):
            raise ValueError('one error estimate per level is required')
        if not all(math.isfinite(e) for e in self.energies):
            raise ValueError('energies must be finite')
        if any(b <= a for a, b in zip(self.energies, self.energies[1:])):
            raise ValueError('energies must be strictly increasing')
        return self

    @property
    def max_error(self) -> float:
        finite = [e for e in self.errors if math.isfinite(e)]
        return max(finite) if finite else float("nan")

    class Config:
        frozen = True
