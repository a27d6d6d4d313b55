"""
qc: local P^2 energies from the exact quantization condition at hbar = 2 pi.

Rows: n, energy, xi, error (xi(E_n) - n - 3/4).
"""

import argparse

from app.commands.common import CommandOutput, add_output_options, build_config
from app.services import periods_service

NAME = "qc"


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="exact quantization condition of local P^2 at hbar = 2 pi")
    parser.add_argument("--levels", type=int, default=5)
    parser.add_argument("--order", type=int, default=None, help="series truncation order J")
    add_output_options(parser)
    parser.set_defaults(handler=handle, hbar="2pi")


def handle(args: argparse.Namespace) -> CommandOutput:
    config = build_config(args, levels=args.levels, geometry="p2", order=args.order)
    pd = periods_service.periods(args.order)
    rows = []
    for n in range(args.levels):
        E = periods_service.qc_energy(n, pd)
        xi = periods_service.xi_of_E(E, pd)
        rows.append({"n": n, "energy": E, "xi": xi, "error": abs(xi - n - 0.75)})
    return CommandOutput(config=config, rows=rows, tolerances={"root": 1e-12})
