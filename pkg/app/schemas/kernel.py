"""
Kernel Pydantic Schemas

Parameters of the quantum dilogarithm and of the exact integral kernel of the
three-term operators e^x + e^y + e^{-mx-ny}.

Schema Types:
- QdilogParams: the quantization parameter b of Faddeev's quantum dilogarithm
- KernelParams: (m, n, hbar) together with the derived b, a, c
- KernelTraceReport: one computed trace with its error estimate
"""

import math

from pydantic import BaseModel, Field, model_validator


class QdilogParams(BaseModel):
    """
    Quantum dilogarithm parameter.

    Fields:
    - b: positive real; hbar = 2*pi*b^2/(m+n+1) for the three-term operators
    """
    b: float = Field(..., gt=0, description="Quantization parameter b")

    @property
    def strip_half_width(self) -> float:
        """Half-width (b + 1/b)/2 of the strip where the integral representation holds."""
        return 0.5 * (self.b + 1.0 / self.b)

    class Config:
        frozen = True


class KernelParams(BaseModel):
    """
    Parameters of the kernel rho_{m,n}(p, p').

    Fields:
    - m, n: positive reals
    - hbar: Planck constant
    - b: sqrt(hbar (m+n+1) / 2 pi)
    - a: m b / (2 (m+n+1))
    - c: b / (2 (m+n+1))

    Build instances with kernel_service.kernel_params(m, n, hbar); direct
    construction is validated against the defining relations.

    Example:
    {
        "m": 1, "n": 1, "hbar": 6.283185307179586,
        "b": 1.7320508075688772, "a": 0.28867513459481287, "c": 0.28867513459481287
    }
    """
    m: float = Field(..., gt=0, description="First exponent of the three-term operator")
    n: float = Field(..., gt=0, description="Second exponent of the three-term operator")
    hbar: float = Field(..., gt=0, description="Planck constant")
    b: float = Field(..., gt=0, description="Quantum dilogarithm parameter")
    a: float = Field(..., gt=0, description="Exponential weight of psi_{a,c}")
    c: float = Field(..., gt=0, description="Shift of psi_{a,c}")

    @model_validator(mode='after')
    def check_relations(self) -> "KernelParams":
        s = self.m + self.n + 1
        expected = {
            "b": math.sqrt(self.hbar * s / (2 * math.pi)),
            "a": self.m * self.b / (2 * s),
            "c": self.b / (2 * s),
        }
        for name, value in expected.items():
            if not math.isclose(getattr(self, name), value, rel_tol=1e-12):
                raise ValueError(f"{name}={getattr(self, name)} does not match its definition ({value})")
        return self

    @property
    def gamma(self) -> float:
        """Imaginary shift a + c - n c in the cosh denominator of the kernel."""
        return self.a + self.c - self.n * self.c

    @property
    def qdilog(self) -> QdilogParams:
        return QdilogParams(b=self.b)

    class Config:
        frozen = True


class KernelTraceReport(BaseModel):
    """JSON report row {m, n, hbar, quantity, value, error}."""
    m: float
    n: float
    hbar: float
    quantity: str = Field(..., description="e.g. 'Tr rho^2' or 'Z(2)'")
    value: float
    error: float = Field(..., ge=0, description="Step-halving difference of the quadrature")
