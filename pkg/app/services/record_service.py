"""
Record Service

This service stores run provenance and BPS tables in the database.
Runs are written only when a subcommand is called with --store; the history
subcommand reads them back.

Functions:
- create_run: Store a run record
- get_run: Get a single run by ID
- get_runs: List runs with optional filtering
- delete_run: Delete a run
- store_bps_table: Store every row of a BPS table
- get_bps_rows: List stored BPS rows of one geometry
"""

import json
import logging
from typing import List, Optional

from sqlalchemy.orm import Session

from app.models.bps_invariant import BPSInvariant
from app.models.run_record import RunRecord
from app.schemas.bps import BPSTable
from app.schemas.run import RunRecordCreate

logger = logging.getLogger(__name__)


def create_run(db: Session, run: RunRecordCreate) -> RunRecord:
    """
    Store a run record.

    Args:
        db: Database session
        run: RunRecordCreate with the config echo and the emitted rows

    Returns:
        Created RunRecord object with generated ID and timestamp
    """
    db_run = RunRecord(
        subcommand=run.subcommand,
        geometry=run.geometry,
        hbar=run.hbar,
        config_json=json.dumps(run.config, sort_keys=True, default=str),
        result_json=json.dumps(run.result, default=str),
        max_error=run.max_error,
    )
    db.add(db_run)
    db.commit()
    db.refresh(db_run)
    logger.info("stored run %s (%s)", db_run.id, db_run.subcommand)
    return db_run


def get_run(db: Session, run_id: str) -> Optional[RunRecord]:
    """
    Get a single run by ID.

    Args:
        db: Database session
        run_id: UUID string of the run

    Returns:
        RunRecord object if found, None otherwise
    """
    return db.query(RunRecord).filter(RunRecord.id == run_id).first()


def get_runs(
    db: Session,
    skip: int = 0,
    limit: int = 100,
    subcommand: Optional[str] = None,
    geometry: Optional[str] = None
) -> List[RunRecord]:
    """
    List runs, newest first.

    Args:
        db: Database session
        skip: Number of records to skip (for pagination)
        limit: Maximum number of records to return
        subcommand: Filter by subcommand
        geometry: Filter by geometry

    Returns:
        List of RunRecord objects
    """
    query = db.query(RunRecord)
    if subcommand:
        query = query.filter(RunRecord.subcommand == subcommand)
    if geometry:
        query = query.filter(RunRecord.geometry == geometry)
    return query.order_by(RunRecord.created_at.desc()).offset(skip).limit(limit).all()


def delete_run(db: Session, run_id: str) -> bool:
    """
    Delete a run.

    Returns:
        True if deleted successfully, False if run not found
    """
    db_run = get_run(db, run_id)
    if not db_run:
        return False
    db.delete(db_run)
    db.commit()
    return True


def store_bps_table(db: Session, table: BPSTable) -> int:
    """
    Store every refined and GV row of a table, replacing rows of the same geometry and version.

    Returns:
        Number of rows written
    """
    db.query(BPSInvariant).filter(
        BPSInvariant.geometry == table.geometry,
        BPSInvariant.data_version == table.version
    ).delete()
    rows = [
        BPSInvariant(geometry=table.geometry, data_version=table.version, kind="refined",
                     degree=",".join(str(d) for d in r.degree), two_jl=r.two_jl, two_jr=r.two_jr,
                     value=r.value)
        for r in table.refined
    ]
    rows += [
        BPSInvariant(geometry=table.geometry, data_version=table.version, kind="gv",
                     degree=",".join(str(d) for d in r.degree), genus=r.genus, value=r.value)
        for r in table.gv
    ]
    db.add_all(rows)
    db.commit()
    logger.info("stored %d BPS rows for %s v%s", len(rows), table.geometry, table.version)
    return len(rows)


def get_bps_rows(
    db: Session,
    geometry: str,
    data_version: Optional[str] = None,
    kind: Optional[str] = None
) -> List[BPSInvariant]:
    """
    Stored BPS rows of one geometry.

    Args:
        db: Database session
        geometry: Geometry name
        data_version: Filter by table version
        kind: "refined" or "gv"

    Returns:
        List of BPSInvariant objects ordered by kind and degree
    """
    query = db.query(BPSInvariant).filter(BPSInvariant.geometry == geometry)
    if data_version:
        query = query.filter(BPSInvariant.data_version == data_version)
    if kind:
        query = query.filter(BPSInvariant.kind == kind)
    return query.order_by(BPSInvariant.kind, BPSInvariant.degree, BPSInvariant.genus).all()
