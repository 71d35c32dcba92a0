"""CSV and JSON emission for trajectories, outcomes and sweeps."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .fbsolver import Trajectory, mapped_grid

TRAJECTORY_HEADER = ("t", "s1", "s2", "s1dot", "s2dot", "u0", "v0", "umax", "vmax")
PROFILE_HEADER = ("t", "xi", "u", "v")


def fmt(x):
    """Full double precision in scientific notation; NaN/inf spelled out."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17e}"


def trajectory_rows(traj: Trajectory):
    cols = [getattr(traj, name) for name in TRAJECTORY_HEADER]
    return zip(*cols)


def write_trajectory_csv(traj: Trajectory, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRAJECTORY_HEADER)
        for row in trajectory_rows(traj):
            w.writerow([fmt(x) for x in row])


def write_profiles_csv(traj: Trajectory, path):
    """One contiguous block of rows per stored profile snapshot."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PROFILE_HEADER)
        for t, _, u, _, v in traj.profiles:
            xi = mapped_grid(u.size - 1)
            vv = v if v is not None else np.full_like(u, np.nan)
            for j in range(u.size):
                w.writerow([fmt(t), fmt(xi[j]), fmt(u[j]), fmt(vv[j])])


def read_csv_columns(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(x) for x in r] for r in body]) if body else np.empty((0, len(header)))
    return {name: data[:, i] for i, name in enumerate(header)}


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    return obj


def dumps(obj):
    """JSON with NaN/inf mapped to null and numpy scalars unwrapped."""
    return json.dumps(_clean(obj), indent=2, sort_keys=False)


def write_json(obj, path):
    Path(path).write_text(dumps(obj) + "\n")


def write_rows_csv(header, rows, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow(["" if x is None else fmt(x) if isinstance(x, (float, np.floating)) else x
                        for x in row])
