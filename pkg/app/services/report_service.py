"""
Report Service

Formats CLI results as CSV or JSON, each preceded by a provenance header.

The header echoes the validated RunConfig, the versions of the numerical
packages, the tolerances the subcommand worked to and (unless disabled) a UTC
timestamp. CSV floats carry 17 significant digits; every row has an error column.

Functions:
- provenance: header dictionary for one run
- format_csv / format_json: render rows with their header
- resolve_output: place bare file names in the configured output directory
- write_report: render and write (or return) the report
- max_error: largest finite error among the rows
"""

import csv
import io
import json
import logging
import math
from datetime import datetime, timezone
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Any, Dict, List, Optional

from app.config import get_settings
from app.schemas.run import RunConfig

logger = logging.getLogger(__name__)

PACKAGES = ("numpy", "scipy", "mpmath", "pydantic", "SQLAlchemy")


def _package_versions() -> Dict[str, str]:
    versions = {}
    for name in PACKAGES:
        try:
            versions[name] = version(name)
        except PackageNotFoundError:
            versions[name] = "unknown"
    return versions


def provenance(config: RunConfig, tolerances: Optional[Dict[str, float]] = None) -> Dict[str, Any]:
    """
    Header of a report.

    Args:
        config: The run's validated configuration
        tolerances: Named tolerances the subcommand worked to

    Returns:
        Dictionary with config, versions, tolerances, mp_dps and (optionally) timestamp
    """
    header = {
        "config": config.model_dump(mode="json"),
        "versions": _package_versions(),
        "mp_dps": get_settings().mp_dps,
        "tolerances": tolerances or {},
    }
    if config.timestamp:
        header["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return header


def _cell(value: Any) -> str:
    if isinstance(value, bool) or value is None:
        return "" if value is None else str(value).lower()
    if isinstance(value, float):
        return f"{value:.17g}"
    if isinstance(value, complex):
        return f"{value.real:.17g}{value.imag:+.17g}j"
    return str(value)


def _columns(rows: List[Dict[str, Any]]) -> List[str]:
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    if "error" in columns:
        columns.remove("error")
    return columns + ["error"]


def format_csv(rows: List[Dict[str, Any]], header: Dict[str, Any]) -> str:
    """
    CSV with the provenance as '# key: json' comment lines.

    Rows without an error entry get an empty error cell.
    """
    buffer = io.StringIO()
    for key, value in header.items():
        buffer.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    columns = _columns(rows)
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row.get(c)) for c in columns])
    return buffer.getvalue()


def _json_safe(value: Any) -> Any:
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def format_json(rows: List[Dict[str, Any]], header: Dict[str, Any]) -> str:
    """{"provenance": header, "rows": rows}, every row with an "error" key."""
    body = [{**{k: _json_safe(v) for k, v in row.items()}, "error": _json_safe(row.get("error"))} for row in rows]
    return json.dumps({"provenance": header, "rows": body}, indent=2, sort_keys=False)


def resolve_output(output: str) -> Path:
    """Bare file names go to the configured output directory; paths are kept."""
    path = Path(output)
    if path.parent == Path("."):
        path = Path(get_settings().output_dir) / path
    return path


def write_report(
    rows: List[Dict[str, Any]],
    config: RunConfig,
    tolerances: Optional[Dict[str, float]] = None
) -> str:
    """
    Render rows in the configured format.

    Returns:
        The rendered text; it is also written to config.output when given
    """
    header = provenance(config, tolerances)
    text = format_json(rows, header) if config.output_format == "json" else format_csv(rows, header)
    if config.output:
        path = resolve_output(config.output)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        logger.info("wrote %d rows to %s", len(rows), path)
    return text


def max_error(rows: List[Dict[str, Any]]) -> Optional[float]:
    errors = [r["error"] for r in rows if isinstance(r.get("error"), (int, float)) and math.isfinite(r["error"])]
    return max(errors) if errors else None
