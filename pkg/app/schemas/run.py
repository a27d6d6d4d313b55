"""
Run Pydantic Schemas

These schemas describe one CLI invocation and its stored provenance.

Schema Types:
- RunConfig: validated options of a subcommand (echoed in every provenance header)
- RunRecordCreate: fields required to store a run
- RunRecord: a stored run as read back from the database
- BPSRow: one stored BPS invariant as read back from the database
"""

import math
import re
from datetime import datetime
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, Field, field_validator

_HBAR_TOKEN = re.compile(r'^(?:(\d+)\*?)?pi(?:/(\d+))?$')


def parse_hbar(token: str) -> float:
    """
    Planck constant from a CLI token.

    Accepts "2pi", "pi", "2pi/3", "p*pi/q" and plain decimals.

    Examples:
        parse_hbar("2pi") == 2 * math.pi
        parse_hbar("3*pi/2") == 1.5 * math.pi
        parse_hbar("1.25") == 1.25

    Raises:
        ValueError: If the token is malformed or not positive
    """
    text = token.strip().replace(" ", "").lower()
    match = _HBAR_TOKEN.match(text)
    if match:
        p = int(match.group(1)) if match.group(1) else 1
        q = int(match.group(2)) if match.group(2) else 1
        if p == 0 or q == 0:
            raise ValueError(f"hbar token '{token}' must be positive")
        return p * math.pi / q
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"cannot read hbar from '{token}' (use 2pi, pi, 2pi/3, p*pi/q or a decimal)")
    if not value > 0 or math.isinf(value):
        raise ValueError(f"hbar must be positive and finite, got {token}")
    return value


class RunConfig(BaseModel):
    """
    Options of one CLI run.

    Fields:
    - subcommand: name of the subcommand
    - geometry: preset name or geometry file, when the subcommand takes one
    - hbar_token: the --hbar text as typed; hbar is parsed from it
    - levels: number of levels / traces requested
    - output_format: csv or json
    - output: file name (bare names land in the configured output directory)
    - store: persist the run record
    - timestamp: include a timestamp in the provenance header
    - params: subcommand-specific options

    Example:
    {
        "subcommand": "spectrum", "geometry": "p2", "hbar_token": "2pi",
        "levels": 5, "output_format": "csv", "store": false, "timestamp": true
    }
    """
    subcommand: str = Field(..., min_length=1)
    geometry: Optional[str] = None
    hbar_token: Optional[str] = Field(None, description="hbar as typed on the command line")
    hbar: Optional[float] = Field(None, gt=0)
    levels: int = Field(5, ge=1, le=200)
    output_format: Literal["csv", "json"] = "csv"
    output: Optional[str] = None
    store: bool = False
    timestamp: bool = True
    params: Dict[str, Any] = Field(default_factory=dict)

    @field_validator('hbar', mode='before')
    @classmethod
    def coerce_hbar(cls, v):
        if isinstance(v, str):
            return parse_hbar(v)
        return v

    def model_post_init(self, __context) -> None:
        if self.hbar is None and self.hbar_token is not None:
            self.hbar = parse_hbar(self.hbar_token)


class RunRecordCreate(BaseModel):
    """Fields needed to store a run; config and result are JSON-serialisable."""
    subcommand: str = Field(..., min_length=1, max_length=40)
    geometry: Optional[str] = Field(None, max_length=100)
    hbar: Optional[float] = Field(None, gt=0)
    config: Dict[str, Any]
    result: Any
    max_error: Optional[float] = Field(None, ge=0)


class RunRecord(BaseModel):
    """
    A stored run.

    Example response:
    {
        "id": "123e4567-e89b-12d3-a456-426614174000",
        "subcommand": "ztrace",
        "geometry": "p2",
        "hbar": 6.283185307179586,
        "max_error": 1.2e-15,
        "created_at": "2024-01-15T10:30:00"
    }
    """
    id: str
    subcommand: str
    geometry: Optional[str]
    hbar: Optional[float]
    config_json: str
    result_json: str
    max_error: Optional[float]
    created_at: datetime

    class Config:
        from_attributes = True


class BPSRow(BaseModel):
    """One stored BPS invariant."""
    id: str
    geometry: str
    data_version: str
    kind: Literal["refined", "gv"]
    degree: str
    two_jl: Optional[int]
    two_jr: Optional[int]
    genus: Optional[int]
    value: int

    class Config:
        from_attributes = True
