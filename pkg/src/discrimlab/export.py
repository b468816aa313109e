"""
Export Module - Write reports to CSV and JSON
"""
import csv
import io
import json
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from .errors import ReportError
from .experiments import Report

# Twelve significant digits: below the certification tolerances, above rounding noise
NUMBER_FORMAT = "{:.12g}"


def format_value(value) -> str:
    """Cell text for CSV output"""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return NUMBER_FORMAT.format(value)
    return str(value)


def json_value(value):
    """Floats rounded to 12 significant digits; everything else as is"""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            return None
        return float(NUMBER_FORMAT.format(value))
    return str(value)


def _write(content: str, export_path: Optional[str]):
    if not export_path:
        return
    path = Path(export_path)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        # newline="" keeps "\n" line endings on every platform
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(content)
    except OSError as e:
        raise ReportError(f"Cannot write report to {path}: {e.strerror or e}")


class CSVExporter:
    """Export a report as CSV: header row, fixed column order"""

    def export_report(self, report: Report, export_path: Optional[str] = None) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(report.columns)
        for row in report.rows:
            writer.writerow([format_value(row.get(column)) for column in report.columns])

        csv_content = buffer.getvalue()
        _write(csv_content, export_path)
        return csv_content


class JSONExporter:
    """Export a report as a JSON array of flat objects"""

    def export_report(self, report: Report, export_path: Optional[str] = None) -> str:
        data: List[Dict] = [
            {column: json_value(row.get(column)) for column in report.columns}
            for row in report.rows
        ]
        json_content = json.dumps(data, indent=2, ensure_ascii=False) + "\n"
        _write(json_content, export_path)
        return json_content


EXPORTERS = {
    "csv": CSVExporter,
    "json": JSONExporter,
}


# Convenience functions
def export_to_csv(report: Report, filepath: Optional[str] = None) -> str:
    """Export report to CSV"""
    return CSVExporter().export_report(report, filepath)


def export_to_json(report: Report, filepath: Optional[str] = None) -> str:
    """Export report to JSON"""
    return JSONExporter().export_report(report, filepath)


def emit(report: Report, format: str = "csv", path: Optional[str] = None) -> str:
    """Serialize a report; written to `path` when given. Returns the text."""
    exporter = EXPORTERS.get(format)
    if exporter is None:
        raise ReportError(f"Unknown report format {format!r} (expected csv or json)")
    return exporter().export_report(report, path)
