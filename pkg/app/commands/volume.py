"""
volume: classical region volumes and Bohr-Sommerfeld energies of a mirror curve.

Rows: n, energy (Bohr-Sommerfeld), tropical_energy, volume, tropical_C, error
(volume - 2 pi hbar (n + 1/2) at the returned energy).
"""

import argparse
import math

from app.commands.common import (
    CommandOutput,
    add_geometry_option,
    add_hbar_option,
    add_output_options,
    build_config,
    load_geometry,
)
from app.services import toric_service

NAME = "volume"


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="toric volumes and Bohr-Sommerfeld energies")
    add_geometry_option(parser)
    add_hbar_option(parser)
    parser.add_argument("--levels", type=int, default=5)
    add_output_options(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> CommandOutput:
    spec = load_geometry(args.geometry, args.mass)
    config = build_config(args, levels=args.levels, geometry=spec.name)
    C = toric_service.tropical_volume_coeff(spec)
    rows = []
    for n in range(args.levels):
        bs = toric_service.bohr_sommerfeld_energy(spec, config.hbar, n)
        volume = toric_service.classical_region_volume(spec, bs.energy)
        target = 2 * math.pi * config.hbar * (n + 0.5)
        rows.append({"n": n, "energy": bs.energy, "tropical_energy": bs.tropical_energy,
                     "volume": volume, "tropical_C": C, "error": abs(volume - target)})
    return CommandOutput(config=config, rows=rows, tolerances={"quad_rel": 1e-8, "root": 1e-10})
