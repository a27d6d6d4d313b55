"""
Services Layer

This package contains the numerical engines of the lab, one module per concern.
Services are plain module-level functions over the pydantic schemas; the CLI
subcommands in app.commands call them and never compute anything themselves.

Modules:
- series_service: truncated power series and log-series arithmetic
- specfun_service: Airy, digamma, dilogarithm, theta and Faddeev's quantum dilogarithm
- toric_service: mirror curves, classical volumes, Bohr-Sommerfeld energies
- quantizer_service: oscillator-basis truncation and extrapolated spectra
- kernel_service: exact kernels of the three-term operators and their traces
- periods_service: Picard-Fuchs periods, exact quantization condition, free energies
- enumerative_service: BPS tables, GV / NS free energies, grand potentials
- fredholm_service: Fredholm determinant, its zeros, Airy and contour traces
- record_service: stored runs and BPS rows
- report_service: CSV / JSON reports with provenance

Usage:
```python
from app.services import periods_service, fredholm_service

E0 = periods_service.qc_energy(0)
gpm = fredholm_service.airy_coeff_table_p2(30)
Z1 = fredholm_service.z_trace_airy(1, gpm)
```
"""

# submodules are imported on demand: app.schemas.periods depends on series_service
__all__ = [
    'series_service',
    'specfun_service',
    'toric_service',
    'quantizer_service',
    'kernel_service',
    'periods_service',
    'enumerative_service',
    'fredholm_service',
    'record_service',
    'report_service',
]
