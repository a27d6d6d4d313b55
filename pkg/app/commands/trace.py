"""
trace: spectral traces of the three-term operators from the exact kernel.

Rows: quantity, m, n, value, error. With --matrix-model the O(2) matrix model
value is added for m = n = 1.
"""

import argparse

from app.commands.common import CommandOutput, add_hbar_option, add_output_options, build_config
from app.services import kernel_service

NAME = "trace"


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="Tr rho^l and Z(N) of rho_{m,n}")
    parser.add_argument("-m", type=float, default=1.0)
    parser.add_argument("-n", type=float, default=1.0)
    add_hbar_option(parser)
    parser.add_argument("--power", "-l", type=int, action="append", default=None, help="Tr rho^l (l <= 3)")
    parser.add_argument("--particles", "-N", type=int, action="append", default=None, help="Z(N) (N <= 3)")
    parser.add_argument("--matrix-model", action="store_true")
    add_output_options(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> CommandOutput:
    powers = args.power or ([] if args.particles else [1])
    particles = args.particles or []
    config = build_config(args, levels=max(powers + particles + [1]), geometry=f"rho_{args.m:g},{args.n:g}",
                          m=args.m, n=args.n, powers=powers, particles=particles,
                          matrix_model=args.matrix_model)
    kp = kernel_service.kernel_params(args.m, args.n, config.hbar)
    rows = []
    for l in powers:
        report = kernel_service.trace_power_report(l, kp)
        rows.append({"quantity": report.quantity, "m": args.m, "n": args.n, "value": report.value,
                     "error": report.error})
    for N in particles:
        report = kernel_service.fermionic_trace_report(N, kp)
        rows.append({"quantity": report.quantity, "m": args.m, "n": args.n, "value": report.value,
                     "error": report.error})
        if args.matrix_model:
            value = kernel_service.matrix_model_z(N, kp)
            rows.append({"quantity": f"Z_mm({N})", "m": args.m, "n": args.n, "value": value,
                         "error": abs(value - report.value)})
    return CommandOutput(config=config, rows=rows, tolerances={"step_refinement": 1e-12})
