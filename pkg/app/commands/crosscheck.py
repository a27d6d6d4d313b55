"""
crosscheck: local P^2 at hbar = 2 pi computed by independent routes.

- energies: Fredholm zeros, exact quantization condition and the operator spectrum
- traces: Z(1), Z(2) from the Airy sum, the contour integral and the kernel
- conifold: t_c from the series and from the Bloch-Wigner function

Rows: quantity, route, value, reference, error (|value - reference|).
"""

import argparse
import math

from app.commands.common import CommandOutput, add_output_options, build_config
from app.schemas.quantization import QuantizationConfig
from app.services import fredholm_service, kernel_service, periods_service, quantizer_service, toric_service

NAME = "crosscheck"

Z_EXACT = {1: 1.0 / 9.0, 2: 1.0 / (12 * math.sqrt(3) * math.pi) - 1.0 / 81.0}


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="three-way agreement report for local P^2 at hbar = 2 pi")
    parser.add_argument("--levels", type=int, default=5)
    parser.add_argument("--skip-traces", action="store_true", help="energies and conifold value only")
    add_output_options(parser)
    parser.set_defaults(handler=handle, hbar="2pi")


def handle(args: argparse.Namespace) -> CommandOutput:
    config = build_config(args, levels=args.levels, geometry="p2", skip_traces=args.skip_traces)
    rows = []
    qc = [periods_service.qc_energy(n) for n in range(args.levels)]
    zeros = fredholm_service.fredholm_zeros((2.0, qc[-1] + 0.3))[:args.levels]
    operator = quantizer_service.spectrum(toric_service.preset("p2"),
                                          QuantizationConfig(hbar=config.hbar), args.levels)
    for n, reference in enumerate(qc):
        rows.append({"quantity": f"E_{n}", "route": "qc", "value": reference, "reference": reference, "error": 0.0})
        if n < len(zeros):
            rows.append({"quantity": f"E_{n}", "route": "fredholm", "value": zeros[n], "reference": reference,
                         "error": abs(zeros[n] - reference)})
        rows.append({"quantity": f"E_{n}", "route": operator.method, "value": operator.energies[n],
                     "reference": reference, "error": abs(operator.energies[n] - reference)})
    if not args.skip_traces:
        gpm = fredholm_service.airy_coeff_table_p2()
        kp = kernel_service.kernel_params(1, 1, config.hbar)
        for N, reference in Z_EXACT.items():
            for route, value in (
                ("airy", fredholm_service.z_trace_airy(N, gpm)),
                ("contour", fredholm_service.z_trace_contour(N)),
                ("kernel", kernel_service.fermionic_trace(N, kp)),
            ):
                rows.append({"quantity": f"Z({N})", "route": route, "value": value, "reference": reference,
                             "error": abs(value - reference)})
    tc = periods_service.conifold_t()
    rows.append({"quantity": "t_c", "route": "series", "value": tc.series_value,
                 "reference": tc.bloch_wigner_value, "error": tc.discrepancy})
    return CommandOutput(config=config, rows=rows, tolerances={"energies": 1e-7, "traces": 1e-6})
