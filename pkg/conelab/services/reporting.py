"""
CSV and JSON serialization of suite reports and experiment rows.

Floats are written with 17 significant digits so doubles round-trip; wall time
is never serialized, which keeps repeated runs byte-identical.
"""

import csv
import io
import json
import logging
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

from pydantic import BaseModel

from conelab.models import SuiteReport

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ["name", "trials", "max_residual", "threshold", "passed"]


def format_value(value) -> str:
    """17 significant digits for floats; lowercase booleans; str otherwise."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def to_csv(columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def report_csv(report: SuiteReport) -> str:
    return to_csv(REPORT_COLUMNS, ([getattr(r, c) for c in REPORT_COLUMNS] for r in report.records))


def report_json(report: SuiteReport) -> str:
    """Single JSON document with config echo, records and the overall verdict."""
    document = report.model_dump(mode="json")
    document["passed"] = report.passed
    return json.dumps(document, indent=2, sort_keys=True) + "\n"


def rows_csv(rows: Sequence[BaseModel]) -> str:
    """Experiment rows as CSV, columns in model field order."""
    if not rows:
        return ""
    columns = list(type(rows[0]).model_fields)
    return to_csv(columns, ([getattr(row, c) for c in columns] for row in rows))


def write_text(path: Optional[str], text: str) -> None:
    """Write to path, or do nothing when path is None."""
    if path is None:
        return
    target = Path(path)
    if target.parent and not target.parent.exists():
        target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text, encoding="utf-8")
    logger.info(f"📝 wrote {target}")


def write_report(report: SuiteReport, path: Optional[str]) -> None:
    """JSON when the path ends in .json, CSV otherwise."""
    if path is None:
        return
    write_text(path, report_json(report) if path.lower().endswith(".json") else report_csv(report))


def write_rows(rows: List[BaseModel], path: Optional[str]) -> None:
    write_text(path, rows_csv(rows))
