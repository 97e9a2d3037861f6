"""Flat-file writers. CSV floats use 9 significant digits."""

import csv
import io
import json
import math

import numpy as np

SWEEP_COLUMNS = ("n", "epsilon_used", "measured_error", "bound_error",
                 "cover_size", "wall_time_s")


def fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".9g")
    if value is None:
        return ""
    return str(value)


def csv_text(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([fmt(row[c]) for c in columns])
    return buf.getvalue()


def sweep_rows(records, wall_time=False):
    """Rows for the sweep CSV; wall time is zeroed unless requested."""
    return [{"n": r.n, "epsilon_used": r.epsilon_used,
             "measured_error": r.measured_error, "bound_error": r.bound_error,
             "cover_size": r.cover_size,
             "wall_time_s": float(r.wall_time) if wall_time else 0.0}
            for r in sorted(records, key=lambda r: r.n)]


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if hasattr(obj, "to_dict"):
        return _plain(obj.to_dict())
    return obj


def json_text(obj):
    return json.dumps(_plain(obj), indent=2, sort_keys=True) + "\n"


def write_text(path, text):
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


def write_table(path_stem, columns, rows, fmt_name):
    """Write ``rows`` as ``<stem>.csv`` or ``<stem>.json``; returns the path."""
    if fmt_name == "csv":
        return write_text(f"{path_stem}.csv", csv_text(columns, rows))
    return write_text(f"{path_stem}.json",
                      json_text([{c: row[c] for c in columns} for row in rows]))
