"""DiagnosticsReport の直列化（JSON / CSV）

出力は決定的: キーはソート済み、浮動小数点数は有効数字 17 桁、非有限値は null。
"""

import csv
import io
import json
import math
from typing import Any, Optional

import numpy as np
import scipy

from bergman_lab import __version__
from bergman_lab.constants import OutputFormat
from bergman_lab.errors import ConfigError
from bergman_lab.models import DiagnosticsReport
from bergman_lab.services.toeplitz import ToeplitzMatrix


def versions() -> dict[str, str]:
    return {"bergman_lab": __version__, "numpy": np.__version__, "scipy": scipy.__version__}


def format_float(x: float) -> str:
    """有効数字 17 桁。整数値でも小数点を残す"""
    text = format(x, ".17g")
    if all(c not in text for c in ".en"):
        text += ".0"
    return text


def _plain(value: Any) -> Any:
    """numpy のスカラー・配列を Python の値に揃える"""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    return value


def _encode(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format_float(value) if math.isfinite(value) else "null"
    if isinstance(value, complex):
        return _encode({"re": value.real, "im": value.imag})
    if isinstance(value, str):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, list):
        return "[" + ",".join(_encode(v) for v in value) + "]"
    if isinstance(value, dict):
        items = sorted(value.items())
        return "{" + ",".join(f"{json.dumps(k, ensure_ascii=False)}:{_encode(v)}" for k, v in items) + "}"
    raise TypeError(f"cannot serialize {type(value).__name__}")


def _csv_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format_float(value) if math.isfinite(value) else ""
    if isinstance(value, (bool, int, str)):
        return str(value).lower() if isinstance(value, bool) else str(value)
    return _encode(value)


def emit_report(report: DiagnosticsReport, fmt: OutputFormat = "json") -> bytes:
    """レポートをバイト列に変換する"""
    data = _plain(report.model_dump())
    if fmt == "json":
        return (_encode(data) + "\n").encode("utf-8")
    if fmt == "csv":
        header = sorted({k for row in data["values"] for k in row})
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in data["values"]:
            writer.writerow([_csv_cell(row.get(k)) for k in header])
        return buf.getvalue().encode("utf-8")
    raise ConfigError(f"unknown output format '{fmt}'")


def parse_report(raw: bytes) -> DiagnosticsReport:
    """emit_report(…, "json") の逆"""
    try:
        return DiagnosticsReport.model_validate(json.loads(raw.decode("utf-8")))
    except ValueError as e:
        raise ConfigError(f"malformed report: {e}") from e


def emit_matrix_csv(matrix: ToeplitzMatrix) -> bytes:
    """行優先、各要素を re,im の組で並べた CSV"""
    n = matrix.order
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"{part}_{m}" for m in range(n) for part in ("re", "im")])
    for row in matrix.entries:
        writer.writerow([format_float(float(x)) for a in row for x in (a.real, a.imag)])
    return buf.getvalue().encode("utf-8")


def matrix_report(matrix: ToeplitzMatrix, summary: Optional[dict] = None) -> DiagnosticsReport:
    """行列を 1 要素 1 行の JSON レポートにする"""
    rows = [
        {"row": n, "col": m, "re": float(matrix.entries[n, m].real), "im": float(matrix.entries[n, m].imag)}
        for n in range(matrix.order)
        for m in range(matrix.order)
    ]
    return DiagnosticsReport(
        kind="matrix",
        symbol=matrix.symbol_id,
        parameters={"N": matrix.order, "rule_fingerprint": matrix.rule_fingerprint},
        values=rows,
        summary=summary or {},
        versions=versions(),
    )
