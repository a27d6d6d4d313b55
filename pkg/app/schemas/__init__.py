"""
Schemas Package

This package contains the pydantic schemas of the lab: validated, mostly
immutable value objects passed between the services and the CLI.

They define:
- Geometry inputs (ToricCurveSpec) and numerical settings (QuantizationConfig, KernelParams)
- Results with their error estimates (SpectrumResult, TraceReport, ...)
- Data files (BPSTable) and stored records (RunRecord)

Importing schemas:
    from app.schemas import ToricCurveSpec, QuantizationConfig
    from app.schemas import BPSTable, GrandPotentialModel
"""

from app.schemas.curve import (
    BohrSommerfeldEstimate,
    EnergyRegion,
    OperatorTerm,
    ToricCurveSpec
)

from app.schemas.quantization import (
    QuantizationConfig,
    SpectrumResult
)

from app.schemas.kernel import (
    KernelParams,
    KernelTraceReport,
    QdilogParams
)

from app.schemas.periods import (
    ConifoldValue,
    FreeEnergyData,
    PeriodData
)

from app.schemas.bps import (
    AiryCoefficient,
    BPSTable,
    BPSValidationReport,
    GrandPotentialModel,
    GVInvariant,
    HMOReport,
    RefinedInvariant
)

from app.schemas.fredholm import (
    DeterminantSample,
    ThetaFrame,
    TraceReport
)

from app.schemas.run import (
    BPSRow,
    RunConfig,
    RunRecord,
    RunRecordCreate,
    parse_hbar
)

__all__ = [
    # Geometry
    "BohrSommerfeldEstimate",
    "EnergyRegion",
    "OperatorTerm",
    "ToricCurveSpec",
    # Quantization
    "QuantizationConfig",
    "SpectrumResult",
    # Kernels
    "KernelParams",
    "KernelTraceReport",
    "QdilogParams",
    # Periods
    "ConifoldValue",
    "FreeEnergyData",
    "PeriodData",
    # BPS and grand potential
    "AiryCoefficient",
    "BPSTable",
    "BPSValidationReport",
    "GrandPotentialModel",
    "GVInvariant",
    "HMOReport",
    "RefinedInvariant",
    # Fredholm
    "DeterminantSample",
    "ThetaFrame",
    "TraceReport",
    # Runs
    "BPSRow",
    "RunConfig",
    "RunRecord",
    "RunRecordCreate",
    "parse_hbar",
]
