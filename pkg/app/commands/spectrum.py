"""
spectrum: lowest energies of a quantized mirror curve.

Rows: n, energy, error, method, size.
"""

import argparse

from app.commands.common import (
    CommandOutput,
    add_geometry_option,
    add_hbar_option,
    add_output_options,
    build_config,
    load_geometry,
)
from app.schemas.quantization import QuantizationConfig
from app.services import quantizer_service

NAME = "spectrum"


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="spectrum of a quantized mirror curve")
    add_geometry_option(parser)
    add_hbar_option(parser)
    parser.add_argument("--levels", type=int, default=5)
    parser.add_argument("--method", choices=("auto", "oscillator", "kernel"), default="auto")
    parser.add_argument("--ladder", type=int, nargs="+", default=None, help="matrix sizes (default 200 300 400)")
    parser.add_argument("--basis-size", type=int, default=None, help="smallest size of a ladder M, 2M, 4M, ...")
    parser.add_argument("--ladder-levels", type=int, default=None, help="number of sizes M, 2M, 4M, ...")
    parser.add_argument("--precision", default="auto", help="'auto', 'double' or decimal digits for mpmath")
    parser.add_argument("--tolerance", type=float, default=1e-7, help="target error; larger estimates warn")
    parser.add_argument("--parity", type=int, choices=(0, 1), default=None,
                        help="even (0) or odd (1) oscillator sector of a parity-symmetric curve")
    add_output_options(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> CommandOutput:
    spec = load_geometry(args.geometry, args.mass)
    config = build_config(args, levels=args.levels, geometry=spec.name, method=args.method,
                          ladder=args.ladder, basis_size=args.basis_size, ladder_levels=args.ladder_levels,
                          precision=args.precision, tolerance=args.tolerance, parity=args.parity)
    options = {"basis_size": args.basis_size, "extrapolation_levels": args.ladder_levels, "ladder": args.ladder}
    precision = args.precision if args.precision in ("auto", "double") else int(args.precision)
    cfg = QuantizationConfig(hbar=config.hbar, working_precision=precision, tolerance=args.tolerance,
                             method=args.method, **{k: v for k, v in options.items() if v is not None})
    if args.parity is not None:
        result = quantizer_service.parity_sector_spectrum(spec, cfg, args.parity, args.levels)
    else:
        result = quantizer_service.spectrum(spec, cfg, args.levels)
    rows = [
        {"n": n, "energy": e, "method": result.method, "size": result.sizes[-1], "error": err}
        for n, (e, err) in enumerate(zip(result.energies, result.errors))
    ]
    return CommandOutput(config=config, rows=rows, tolerances={"refinement": 1e-12, "target": args.tolerance})
