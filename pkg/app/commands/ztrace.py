"""
ztrace: fermionic traces Z(N, 2 pi) of local P^2 from the Airy sum and the contour integral.

Rows: N, method, value, error.
"""

import argparse

from app.commands.common import CommandOutput, add_output_options, build_config
from app.services import fredholm_service

NAME = "ztrace"


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="Z(N, 2 pi) from the grand potential")
    parser.add_argument("--N", dest="particles", type=int, action="append", default=None)
    parser.add_argument("--method", choices=("airy", "contour", "both"), default="both")
    parser.add_argument("--cutoff", type=int, default=30, help="largest l in the Airy table")
    parser.add_argument("--mu0", type=float, default=2.0, help="anchor of the contour")
    add_output_options(parser)
    parser.set_defaults(handler=handle, hbar="2pi")


def handle(args: argparse.Namespace) -> CommandOutput:
    particles = args.particles or [1, 2, 3]
    config = build_config(args, levels=max(particles), geometry="p2", particles=particles,
                          method=args.method, cutoff=args.cutoff, mu0=args.mu0)
    rows = []
    gpm = fredholm_service.airy_coeff_table_p2(args.cutoff) if args.method in ("airy", "both") else None
    for N in particles:
        reports = []
        if gpm is not None:
            reports.append(fredholm_service.z_trace_airy_report(N, gpm))
        if args.method in ("contour", "both"):
            reports.append(fredholm_service.z_trace_contour_report(N, args.mu0))
        rows += [{"N": r.N, "method": r.method, "value": r.value, "error": r.error_estimate} for r in reports]
    return CommandOutput(config=config, rows=rows,
                         tolerances={"airy": fredholm_service.AIRY_TOL, "contour": fredholm_service.CONTOUR_TOL})
