from sqlalchemy import Column, String, Integer, DateTime, CheckConstraint
from datetime import datetime
import uuid

from app.database import Base


class BPSInvariant(Base):
    """BPSInvariant model - one stored row of a BPS table

    kind is "refined" (two_jl, two_jr set) or "gv" (genus set). degree is the
    degree vector as comma-separated integers.
    """
    __tablename__ = "bps_invariants"

    id = Column(String, primary_key=True, default=lambda: str(uuid.uuid4()))
    geometry = Column(String(100), nullable=False, index=True)
    data_version = Column(String(40), nullable=False)
    kind = Column(String(10), nullable=False)
    degree = Column(String(100), nullable=False)
    two_jl = Column(Integer, nullable=True)
    two_jr = Column(Integer, nullable=True)
    genus = Column(Integer, nullable=True)
    value = Column(Integer, nullable=False)
    created_at = Column(DateTime, default=datetime.utcnow)

    __table_args__ = (
        CheckConstraint("kind IN ('refined', 'gv')", name='known_kind'),
        CheckConstraint('genus IS NULL OR genus >= 0', name='non_negative_genus'),
    )

    def __repr__(self):
        return f"<BPSInvariant(geometry={self.geometry}, kind={self.kind}, degree={self.degree}, value={self.value})>"
