"""
Mirror Lab - command-line entry point

This is the main entry point of the lab. It sets up:
- The argparse parser with one subcommand per module in app.commands
- Root logging from the configured level
- Rendering of the rows (CSV or JSON with a provenance header)
- Optional storage of the run (--store)
- Exit codes: 0 success, 2 usage and input errors, 3 numeric-domain errors

To run:
    python -m app.main spectrum --geometry p2 --hbar 2pi --levels 5
    python -m app.main ztrace --N 1 --N 2 --format json
"""

import argparse
import logging
import sys
import warnings
from typing import List, Optional

from pydantic import ValidationError

from app.commands import register_all
from app.config import get_settings
from app.database import Base, SessionLocal, engine
from app.exceptions import ConvergenceWarning, MirrorLabError, UsageError
from app.models import BPSInvariant, RunRecord  # noqa: F401  (register tables with Base)
from app.schemas.run import RunRecordCreate
from app.services import record_service, report_service

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mirror-lab",
        description="Quantized mirror curves: spectra, traces and their enumerative predictions.",
    )
    parser.add_argument("--log-level", default=None, help="override MIRROR_LAB_LOG_LEVEL")
    subparsers = parser.add_subparsers(dest="command", required=True)
    register_all(subparsers)
    return parser


def _configure_logging(level: Optional[str]) -> None:
    name = (level or get_settings().log_level).upper()
    if name not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise UsageError(f"unknown log level '{level}'")
    logging.basicConfig(level=name, format=LOG_FORMAT, stream=sys.stderr)


def _store(output) -> None:
    db = SessionLocal()
    try:
        record_service.create_run(db, RunRecordCreate(
            subcommand=output.config.subcommand,
            geometry=output.config.geometry,
            hbar=output.config.hbar,
            config=output.config.model_dump(mode="json"),
            result=output.rows,
            max_error=report_service.max_error(output.rows),
        ))
    finally:
        db.close()


def run(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and emit its report.

    Returns:
        Process exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2

    try:
        _configure_logging(args.log_level)
        if args.command in ("validate-bps", "history") or getattr(args, "store", False):
            Base.metadata.create_all(bind=engine)
        with warnings.catch_warnings():
            warnings.simplefilter("always", ConvergenceWarning)
            output = args.handler(args)
        text = report_service.write_report(output.rows, output.config, output.tolerances)
        if not output.config.output:
            sys.stdout.write(text)
        if output.config.store:
            _store(output)
    except ValidationError as e:
        logger.error("invalid input: %s", e.errors()[0]["msg"])
        return 2
    except MirrorLabError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return e.exit_code
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
