"""CSV/JSON readers for the harness output schemas.

Validation is strict: a header missing an expected column raises a
SchemaError naming the first missing column, and files with no data rows
are rejected.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

TRAJECTORY_COLUMNS = (
    "step",
    "loss",
    "loss_se",
    "grad_norm",
    "potential_u",
    "mu_max",
    "comp_norms",
)
GRAD_VS_D_COLUMNS = ("d", "grad_norm", "grad_norm_se")
STAT_COLUMNS = ("sample_size", "mean_param_error", "std_param_error", "runs")


class SchemaError(ValueError):
    """An input file does not match the documented harness schema."""


def _read_rows(path, columns):
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file, expected header "
                              f"{','.join(columns)}") from None
        missing = [c for c in columns if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column {missing[0]!r}")
        idx = [header.index(c) for c in columns]
        rows = []
        for lineno, raw in enumerate(reader, start=2):
            if not raw:
                continue
            if len(raw) < len(header):
                raise SchemaError(f"{path}:{lineno}: expected "
                                  f"{len(header)} fields, got {len(raw)}")
            rows.append([raw[i] for i in idx])
    if not rows:
        raise SchemaError(f"{path}: no data rows")
    return rows


def read_trajectory_csv(path):
    """Parse a trajectory CSV into a list of trajectory blocks.

    Files may concatenate several trajectories; each block restarts at
    step 0.  Every block is a dict of column name -> list of floats
    (comp_norms becomes a list of per-component lists).
    """
    blocks = []
    current = None
    for row in _read_rows(path, TRAJECTORY_COLUMNS):
        step = int(float(row[0]))
        if step == 0 or current is None:
            current = {c: [] for c in TRAJECTORY_COLUMNS}
            blocks.append(current)
        for col, value in zip(TRAJECTORY_COLUMNS, row):
            if col == "step":
                current[col].append(step)
            elif col == "comp_norms":
                current[col].append([float(v) for v in value.split(";")])
            else:
                current[col].append(float(value))
    return blocks


def read_grad_vs_d_csv(path):
    """Parse a gradient-norm-vs-dimension CSV into a dict of columns."""
    rows = _read_rows(path, GRAD_VS_D_COLUMNS)
    return {
        "d": [int(float(r[0])) for r in rows],
        "grad_norm": [float(r[1]) for r in rows],
        "grad_norm_se": [float(r[2]) for r in rows],
    }


def read_stat_csv(path):
    """Parse a statistical-rate CSV into a dict of columns."""
    rows = _read_rows(path, STAT_COLUMNS)
    return {
        "sample_size": [int(float(r[0])) for r in rows],
        "mean_param_error": [float(r[1]) for r in rows],
        "std_param_error": [float(r[2]) for r in rows],
        "runs": [int(float(r[3])) for r in rows],
    }


def read_summary_json(path):
    with open(path) as fh:
        return json.load(fh)


def split_inputs(paths):
    """Partition input paths into CSV paths and parsed JSON summaries."""
    csvs, summaries = [], []
    for p in paths:
        if str(p).endswith(".json"):
            summaries.append(read_summary_json(p))
        else:
            csvs.append(p)
    return csvs, summaries
