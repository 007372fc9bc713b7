import csv
import json
import logging as log
from pathlib import Path

from modules.Report import Report

#Config
import broadlearn.config as cfg # noqa: F401

report_stack = []


def stash_report(report: Report, path: Path, rows: list = None):
    """
    Stores a report for later writing with commit_reports(), so that nothing is written
    when a command fails halfway.

    Args:
        report (Report): The report.
        path (Path): Destination of the JSON document. The CSV summary goes next to it.
        rows (list): CSV rows to write instead of the report's own summary rows.
    """
    global report_stack
    report_stack.append((Path(path), report, rows))


def commit_reports() -> list:
    """
    Writes every stashed report as JSON plus a flat CSV summary.

    Returns:
        list: The JSON paths, in stash order.
    """
    global report_stack
    written = []
    for path, report, rows in report_stack:
        write_report_json(report, path)
        write_rows_csv(report.summary_rows() if rows is None else rows, path.with_suffix(".csv"))
        written.append(path)
    report_stack = []
    return written


def discard_reports():
    global report_stack
    report_stack = []


def write_report_json(report: Report, path: Path, timing: bool = True):
    with open(path, "w") as json_file:
        json.dump(report.to_dict(timing), json_file, indent=2)
    log.debug(f"Report written to {path}")


def write_rows_csv(rows: list, path: Path):
    """Writes dict rows as CSV, columns in first-seen order."""
    fields = list(dict.fromkeys(key for row in rows for key in row))
    with open(path, "w", newline="") as csv_file:
        writer = csv.DictWriter(csv_file, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)
    log.debug(f"{len(rows)} summary rows written to {path}")
