"""
Shared pieces of the subcommands.

Every subcommand module exposes register(subparsers) and handle(args); handle
returns a CommandOutput that app.main renders, writes and optionally stores.
"""

import argparse
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from app.schemas.curve import ToricCurveSpec
from app.schemas.run import RunConfig, parse_hbar
from app.services import toric_service


@dataclass
class CommandOutput:
    """Rows of one run together with its configuration and tolerances."""
    config: RunConfig
    rows: List[Dict[str, Any]]
    tolerances: Dict[str, float] = field(default_factory=dict)


def hbar_token(text: str) -> str:
    """argparse type: validate the token, keep the text for the provenance echo."""
    try:
        parse_hbar(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e))
    return text


def add_output_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", dest="output_format", choices=("csv", "json"), default="csv")
    parser.add_argument("--output", "-o", default=None, help="file name (bare names go to the output directory)")
    parser.add_argument("--store", action="store_true", help="store the run in the database")
    parser.add_argument("--no-timestamp", dest="timestamp", action="store_false",
                        help="omit the timestamp from the provenance header")


def add_hbar_option(parser: argparse.ArgumentParser, default: str = "2pi") -> None:
    parser.add_argument("--hbar", type=hbar_token, default=default,
                        help="Planck constant: 2pi, pi, 2pi/3, p*pi/q or a decimal")


def add_geometry_option(parser: argparse.ArgumentParser, default: str = "p2") -> None:
    parser.add_argument("--geometry", "--preset", "-g", dest="geometry", default=default,
                        help="preset name (p2, f0, f1, f2, b2, b3, p1mn) or a geometry JSON file")
    parser.add_argument("--mass", type=float, action="append", default=None,
                        help="mass parameter, repeat for several (xi, xi1, xi2, ...)")


def load_geometry(name: str, masses: Optional[List[float]] = None) -> ToricCurveSpec:
    """Preset by name, or a geometry JSON file when the name is an existing path."""
    if Path(name).suffix == ".json" or Path(name).exists():
        return toric_service.load_geometry_file(name)
    params: Dict[str, float] = {}
    if masses:
        keys = ["xi"] if len(masses) == 1 else [f"xi{i + 1}" for i in range(len(masses))]
        if name.lower() == "p1mn":
            keys = ["m", "n"][:len(masses)]
        params = dict(zip(keys, masses))
    return toric_service.preset(name, **params)


def build_config(args: argparse.Namespace, levels: int = 5, geometry: Optional[str] = None,
                 **params: Any) -> RunConfig:
    token = getattr(args, "hbar", None)
    return RunConfig(
        subcommand=args.command,
        geometry=geometry,
        hbar_token=token,
        levels=levels,
        output_format=args.output_format,
        output=args.output,
        store=args.store,
        timestamp=args.timestamp,
        params=params,
    )


def finite_or_none(x: float) -> Optional[float]:
    return x if math.isfinite(x) else None
