"""Deterministic CSV/JSON serialization of reports and summaries.

Column order is fixed (name first, remaining keys sorted), floats carry 17
significant digits, files are newline-terminated; identical inputs produce
byte-identical files.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .errors import InvalidArgumentError, ReportIOError
from .verifier import InequalityReport

__all__ = ["emit_report", "emit_csv_rows", "emit_json"]


def _format_value(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _columns(rows: list[dict]) -> list[str]:
    keys: set[str] = set()
    for row in rows:
        keys.update(row)
    ordered = [k for k in ("name",) if k in keys]
    ordered += sorted(keys - set(ordered))
    return ordered


def emit_csv_rows(rows: list[dict], path: str | Path):
    if not rows:
        raise InvalidArgumentError("no rows to emit")
    cols = _columns(rows)
    try:
        with Path(path).open("w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(cols)
            for row in rows:
                writer.writerow([_format_value(row.get(c, "")) for c in cols])
    except OSError as exc:
        raise ReportIOError(path, exc) from exc


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, int, str)) or obj is None:
        return obj
    if isinstance(obj, float):
        return obj
    if hasattr(obj, "item"):  # numpy scalars
        return obj.item()
    return str(obj)


def emit_json(obj, path: str | Path):
    text = json.dumps(_jsonable(obj), sort_keys=True, indent=2)
    try:
        Path(path).write_text(text + "\n", encoding="utf-8")
    except OSError as exc:
        raise ReportIOError(path, exc) from exc


def emit_report(reports: list[InequalityReport], format: str, path: str | Path):
    """Serialize inequality reports as CSV rows or a JSON array."""
    if not reports:
        raise InvalidArgumentError("emit_report requires a nonempty report list")
    rows = [r.as_row() for r in reports]
    if format == "csv":
        emit_csv_rows(rows, path)
    elif format == "json":
        emit_json(rows, path)
    else:
        raise InvalidArgumentError(f"unknown report format {format!r}")
