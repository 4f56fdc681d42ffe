"""レポートの直列化"""

import csv
import io
import json

import numpy as np
import pytest

from bergman_lab import __version__
from bergman_lab.errors import ConfigError
from bergman_lab.models import DiagnosticsReport
from bergman_lab.services.report import (
    emit_matrix_csv,
    emit_report,
    format_float,
    matrix_report,
    parse_report,
    versions,
)
from bergman_lab.services.toeplitz import ToeplitzMatrix


def _report() -> DiagnosticsReport:
    return DiagnosticsReport(
        kind="boundedness",
        symbol="abs2",
        parameters={"N": 8, "q": 2.0},
        grid={"radii": [0.0, 0.5], "angles": 1},
        values=[
            {"radius": 0.0, "angle": 0, "norm": np.float64(0.5)},
            {"radius": 0.5, "angle": 0, "norm": 0.1, "norm_conj": float("nan")},
        ],
        summary={"sup": 0.5, "verdict": "boundedness supported: profile bounded on grid"},
        versions=versions(),
    )


class TestFormatFloat:
    @pytest.mark.parametrize("value, text", [
        (1.0, "1.0"),
        (0.1, "0.10000000000000001"),
        (-2.0, "-2.0"),
        (1e-20, "9.9999999999999995e-21"),
    ])
    def test_round_trip_digits(self, value, text):
        assert format_float(value) == text
        assert float(format_float(value)) == value


class TestEmitReport:
    def test_json_is_deterministic(self):
        assert emit_report(_report()) == emit_report(_report())

    def test_json_keys_sorted_and_nan_is_null(self):
        raw = emit_report(_report())
        data = json.loads(raw)
        assert list(data) == sorted(data)
        assert data["values"][1]["norm_conj"] is None
        assert data["values"][0]["norm"] == 0.5
        assert raw.endswith(b"\n")

    def test_json_parses_back(self):
        parsed = parse_report(emit_report(_report()))
        assert parsed.kind == "boundedness"
        assert parsed.summary["sup"] == 0.5
        assert parsed.versions["bergman_lab"] == __version__

    def test_csv_header_is_sorted_union(self):
        rows = list(csv.reader(io.StringIO(emit_report(_report(), "csv").decode())))
        assert rows[0] == ["angle", "norm", "norm_conj", "radius"]
        assert rows[1] == ["0", "0.5", "", "0.0"]
        assert rows[2][2] == ""

    def test_unknown_format(self):
        with pytest.raises(ConfigError):
            emit_report(_report(), "xml")

    def test_malformed_report(self):
        with pytest.raises(ConfigError):
            parse_report(b"{not json")


class TestMatrixOutput:
    def test_csv_layout(self):
        matrix = ToeplitzMatrix(np.array([[1.0, 0.5j], [0.0, 2.0]]), "test")
        lines = emit_matrix_csv(matrix).decode().splitlines()
        assert lines[0] == "re_0,im_0,re_1,im_1"
        assert lines[1] == "1.0,0.0,0.0,0.5"
        assert lines[2] == "0.0,0.0,2.0,0.0"

    def test_json_rows(self):
        matrix = ToeplitzMatrix(np.eye(2, dtype=complex), "const:1", "abc")
        report = matrix_report(matrix, {"operator_norm": 1.0})
        assert report.kind == "matrix"
        assert len(report.values) == 4
        assert report.values[1] == {"row": 0, "col": 1, "re": 0.0, "im": 0.0}
        assert report.parameters["rule_fingerprint"] == "abc"


def test_versions():
    assert set(versions()) == {"bergman_lab", "numpy", "scipy"}
