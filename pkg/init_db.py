"""
Database initialization script
Creates the run-record and BPS tables and loads the default BPS table.

    python init_db.py                 # tables + default table
    python init_db.py --no-seed       # tables only
"""
import argparse
import logging

from dotenv import load_dotenv

from app.database import Base, SessionLocal, engine
from app.models import BPSInvariant, RunRecord  # noqa: F401
from app.services import enumerative_service, record_service

logger = logging.getLogger(__name__)


def init_database(seed: bool = True) -> int:
    """
    Create all tables and optionally store the default BPS table.

    Returns:
        Number of BPS rows stored (0 without seeding)
    """
    Base.metadata.create_all(bind=engine)
    logger.info("tables ready: %s", ", ".join(sorted(Base.metadata.tables)))
    if not seed:
        return 0
    table = enumerative_service.default_table()
    db = SessionLocal()
    try:
        count = record_service.store_bps_table(db, table)
    finally:
        db.close()
    logger.info("seeded %d rows of %s v%s", count, table.geometry, table.version)
    return count


if __name__ == "__main__":
    load_dotenv()
    parser = argparse.ArgumentParser(description="create the Mirror Lab database")
    parser.add_argument("--no-seed", dest="seed", action="store_false", help="skip the default BPS table")
    args = parser.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    init_database(seed=args.seed)
