"""
history: list stored runs.

Rows: id, subcommand, geometry, hbar, created_at, error (the run's max error).
"""

import argparse

from app.commands.common import CommandOutput, add_output_options, build_config
from app.database import SessionLocal
from app.services import record_service

NAME = "history"


def register(subparsers) -> None:
    parser = subparsers.add_parser(NAME, help="list stored runs")
    parser.add_argument("--subcommand", default=None)
    parser.add_argument("--geometry", default=None)
    parser.add_argument("--limit", type=int, default=20)
    add_output_options(parser)
    parser.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> CommandOutput:
    config = build_config(args, levels=args.limit, subcommand_filter=args.subcommand, geometry_filter=args.geometry)
    db = SessionLocal()
    try:
        runs = record_service.get_runs(db, limit=args.limit, subcommand=args.subcommand, geometry=args.geometry)
        rows = [{"id": r.id, "subcommand": r.subcommand, "geometry": r.geometry, "hbar": r.hbar,
                 "created_at": r.created_at.isoformat(timespec="seconds"), "error": r.max_error} for r in runs]
    finally:
        db.close()
    # history itself is never stored
    config = config.model_copy(update={"store": False})
    return CommandOutput(config=config, rows=rows)
