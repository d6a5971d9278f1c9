"""Structured output files: schema-versioned CSV/JSONL tables, checkpoint
reports, and run manifests.

Every table row carries the schema version so golden-file comparisons
survive format evolution.  Data files are byte-deterministic for a fixed
configuration: values are formatted with repr (shortest round-trip) and
row order is fixed by the caller.  Wall-clock columns are only added when
timing output is explicitly requested, so default outputs hash equal
across runs.
"""

from __future__ import annotations

import csv
import json

from .errors import DomainError
from .scan import ScanReport, fit_exponent

__all__ = [
    "SCHEMA_VERSION",
    "format_cell",
    "write_table",
    "write_lines",
    "write_checkpoint_table",
    "write_manifest",
]

SCHEMA_VERSION = 1


def format_cell(value) -> str:
    """Deterministic text for one cell; floats via repr round-trip."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def write_table(path: str, columns: list[str], rows: list[dict],
                fmt: str = "csv") -> str:
    """Write rows as CSV or JSONL; returns the path written.

    Missing keys become empty cells; extra keys are an error (they would
    silently vanish from the table).
    """
    allowed = set(columns)
    for row in rows:
        stray = set(row) - allowed
        if stray:
            raise DomainError(f"row has columns {sorted(stray)} not in schema")
    if fmt == "csv":
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["schema_version", *columns])
            for row in rows:
                writer.writerow([str(SCHEMA_VERSION),
                                 *(format_cell(row.get(col)) for col in columns)])
    elif fmt == "jsonl":
        with open(path, "w", encoding="utf-8") as fh:
            for row in rows:
                record = {"schema_version": SCHEMA_VERSION}
                record.update({col: row.get(col) for col in columns})
                fh.write(json.dumps(record, sort_keys=True, default=format_cell))
                fh.write("\n")
    else:
        raise DomainError(f"unknown output format {fmt!r}")
    return path


def write_lines(path: str, values) -> str:
    """One value per line (the exceptional-list format)."""
    with open(path, "w", encoding="utf-8") as fh:
        for value in values:
            fh.write(f"{value}\n")
    return path


def write_checkpoint_table(path: str, report: ScanReport,
                           fmt: str = "csv") -> str:
    """Checkpoint table: x, count, cumulative density, slope fitted so far."""
    rows = []
    seen = []
    for x, count in report.checkpoints:
        seen.append((x, count))
        try:
            slope = fit_exponent(seen).slope
        except DomainError:
            slope = None
        rows.append({"x": x, "count": count, "density": count / x,
                     "fitted_slope_so_far": slope})
    return write_table(path, ["x", "count", "density", "fitted_slope_so_far"],
                       rows, fmt)


def write_manifest(path: str, *, subcommand: str, config: dict,
                   version: str, started: str, finished: str,
                   timing: dict, escalation: dict, outputs: list[str]) -> str:
    """Run manifest: full config echo plus reproducibility metadata.

    The config block is sufficient to repeat the run; outputs lists the
    data files written (relative names), whose bytes the repeat must
    reproduce.  Timing and escalation statistics are diagnostics and are
    expected to differ between repeats.
    """
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "tool": "floorsum",
        "tool_version": version,
        "subcommand": subcommand,
        "config": config,
        "started": started,
        "finished": finished,
        "timing_seconds": timing,
        "precision_escalations": escalation,
        "outputs": outputs,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    return path
