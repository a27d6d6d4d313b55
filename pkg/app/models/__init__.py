from app.models.run_record import RunRecord
from app.models.bps_invariant import BPSInvariant

__all__ = ["RunRecord", "BPSInvariant"]
