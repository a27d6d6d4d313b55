"""
xi: Fredholm determinant Xi(-kappa, 2 pi) on a logarithmic kappa grid.

Rows: kappa, value, method, error (empty: no estimate for single evaluations).
"""

import argparse

import numpy as np

from app.commands.common import CommandOutput, add_output_options, build_config
from app.services import fredholm_service

NAME = "xi"


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="sample Xi(-kappa, 2 pi) for plotting")
    parser.add_argument("--kmin", type=float, default=0.5)
    parser.add_argument("--kmax", type=float, default=float(np.exp(6.0)))
    parser.add_argument("--points", type=int, default=50)
    parser.add_argument("--zeros", action="store_true", help="list the zeros E_n in [log kmin, log kmax] instead")
    add_output_options(parser)
    parser.set_defaults(handler=handle, hbar="2pi")


def handle(args: argparse.Namespace) -> CommandOutput:
    config = build_config(args, levels=args.points, geometry="p2", kmin=args.kmin, kmax=args.kmax,
                          zeros=args.zeros)
    if args.zeros:
        roots = fredholm_service.fredholm_zeros((float(np.log(args.kmin)), float(np.log(args.kmax))))
        rows = [{"n": i, "energy": E, "error": None} for i, E in enumerate(roots)]
        return CommandOutput(config=config, rows=rows, tolerances={"root": 1e-12})
    grid = np.geomspace(args.kmin, args.kmax, args.points)
    samples = fredholm_service.sample_determinant([float(k) for k in grid])
    rows = [{"kappa": s.kappa, "value": s.value, "method": s.method, "error": None} for s in samples]
    return CommandOutput(config=config, rows=rows)
