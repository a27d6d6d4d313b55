from sqlalchemy import Column, String, Float, Text, DateTime, CheckConstraint
from datetime import datetime
import uuid

from app.database import Base


class RunRecord(Base):
    """RunRecord model - provenance of one CLI run

    config_json and result_json hold the validated RunConfig and the emitted
    rows as JSON text; max_error is the largest error estimate among the rows.
    """
    __tablename__ = "run_records"

    id = Column(String, primary_key=True, default=lambda: str(uuid.uuid4()))
    subcommand = Column(String(40), nullable=False, index=True)
    geometry = Column(String(100), nullable=True, index=True)
    hbar = Column(Float, nullable=True)
    config_json = Column(Text, nullable=False)
    result_json = Column(Text, nullable=False)
    max_error = Column(Float, nullable=True)
    created_at = Column(DateTime, default=datetime.utcnow)

    __table_args__ = (
        CheckConstraint('hbar IS NULL OR hbar > 0', name='positive_hbar'),
        CheckConstraint('max_error IS NULL OR max_error >= 0', name='non_negative_max_error'),
    )

    def __repr__(self):
        return f"<RunRecord(id={self.id}, subcommand={self.subcommand}, geometry={self.geometry})>"
