import csv
import io
import json
import math

import pytest

from app.schemas.run import RunConfig
from app.services import report_service


def _config(**kwargs):
    return RunConfig(subcommand="qc", geometry="p2", hbar_token="2pi", timestamp=False, **kwargs)


def _csv_body(text):
    lines = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.reader(io.StringIO("\n".join(lines))))


def test_provenance_header():
    header = report_service.provenance(_config(), {"root": 1e-12})
    assert header["config"]["hbar"] == pytest.approx(2 * math.pi)
    assert header["config"]["hbar_token"] == "2pi"
    assert header["tolerances"] == {"root": 1e-12}
    assert set(header["versions"]) == set(report_service.PACKAGES)
    assert "timestamp" not in header


def test_provenance_timestamp():
    header = report_service.provenance(RunConfig(subcommand="qc"))
    assert "timestamp" in header


def test_csv_puts_error_last():
    rows = [{"error": 1e-13, "n": 0, "energy": 2.5626420686238194}]
    body = _csv_body(report_service.format_csv(rows, {}))
    assert body[0] == ["n", "energy", "error"]


def test_csv_uses_full_precision():
    rows = [{"n": 0, "energy": 2.5626420686238194, "error": 0.1}]
    body = _csv_body(report_service.format_csv(rows, {}))
    assert float(body[1][1]) == 2.5626420686238194
    assert body[1][1] == f"{2.5626420686238194:.17g}"


def test_csv_missing_error_is_empty():
    body = _csv_body(report_service.format_csv([{"n": 1}], {}))
    assert body == [["n", "error"], ["1", ""]]


def test_csv_header_lines():
    text = report_service.format_csv([{"n": 0, "error": 0.0}], {"tolerances": {"root": 1e-12}})
    assert text.splitlines()[0] == '# tolerances: {"root": 1e-12}'


def test_json_report():
    rows = [{"n": 0, "value": complex(1.0, -2.0), "error": float("nan")}, {"n": 1}]
    doc = json.loads(report_service.format_json(rows, {"mp_dps": 30}))
    assert doc["provenance"] == {"mp_dps": 30}
    assert doc["rows"][0]["value"] == {"re": 1.0, "im": -2.0}
    assert doc["rows"][0]["error"] == "nan"
    assert doc["rows"][1]["error"] is None


def test_write_report_to_file(tmp_path):
    path = tmp_path / "qc.json"
    text = report_service.write_report([{"n": 0, "error": 0.0}], _config(output=str(path), output_format="json"))
    assert path.read_text() == text
    assert json.loads(text)["provenance"]["config"]["output_format"] == "json"


def test_resolve_output_keeps_paths(tmp_path):
    path = tmp_path / "out.csv"
    assert report_service.resolve_output(str(path)) == path


def test_max_error():
    rows = [{"error": 1e-9}, {"error": float("nan")}, {"error": None}, {"n": 2}, {"error": 3e-8}]
    assert report_service.max_error(rows) == 3e-8
    assert report_service.max_error([{"error": None}]) is None
