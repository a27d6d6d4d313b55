"""
validate-bps: load and check a BPS table; --store also writes its rows.

Rows: check, degrees, value, error.
"""

import argparse

from app.commands.common import CommandOutput, add_output_options, build_config
from app.database import SessionLocal
from app.services import enumerative_service, record_service

NAME = "validate-bps"


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="validate a BPS data file")
    parser.add_argument("table", nargs="?", default=enumerative_service.DEFAULT_TABLE,
                        help="JSON file or shipped table name")
    parser.add_argument("--seed", type=int, default=0, help="seed of the spin-sum sample points")
    add_output_options(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> CommandOutput:
    table = enumerative_service.load_bps_table(args.table)
    report = enumerative_service.validate_bps_table(table, seed=args.seed)
    config = build_config(args, geometry=table.geometry, table=str(args.table), version=table.version,
                          seed=args.seed)
    rows = [
        {"check": "spin_sum", "degrees": " ".join(map(str, report.spin_sum_degrees)),
         "value": len(report.spin_sum_degrees), "error": report.max_spin_residual},
        {"check": "genus_zero", "degrees": " ".join(map(str, report.genus_zero_degrees)),
         "value": len(report.genus_zero_degrees), "error": 0.0},
        {"check": "genus_one", "degrees": " ".join(map(str, report.genus_one_degrees)),
         "value": len(report.genus_one_degrees), "error": 0.0},
    ]
    if args.store:
        db = SessionLocal()
        try:
            record_service.store_bps_table(db, table)
        finally:
            db.close()
    return CommandOutput(config=config, rows=rows, tolerances={"spin_sum": enumerative_service.SPIN_SUM_TOLERANCE})
