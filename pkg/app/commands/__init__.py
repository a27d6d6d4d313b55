"""
Subcommand Registration

Each module registers one subcommand on the CLI parser and sets its handler.

Structure:
- spectrum      quantized mirror curves (quantizer)
- qc            exact quantization condition (mirror periods)
- xi            Fredholm determinant sampling and zeros (fredholm)
- volume        toric volumes and Bohr-Sommerfeld energies (toric geometry)
- trace         kernel traces (kernels)
- ztrace        Airy and contour traces (fredholm)
- validate-bps  BPS data ingestion (enumerative)
- crosscheck    three-way agreement report
- history       stored runs
"""

from app.commands import (
    crosscheck,
    history,
    qc,
    spectrum,
    trace,
    validate_bps,
    volume,
    xi,
    ztrace,
)

COMMANDS = [spectrum, qc, xi, volume, trace, ztrace, validate_bps, crosscheck, history]


def register_all(subparsers) -> None:
    for module in COMMANDS:
        module.register(subparsers)


__all__ = ["COMMANDS", "register_all"]
