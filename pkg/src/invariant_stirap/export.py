"""Deterministic CSV/JSON writers (12 significant digits, fixed column order)."""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

PULSE_COLUMNS = ("t_us", "omega_p_rad_per_us", "omega_s_rad_per_us")
TRAJECTORY_COLUMNS = ("t_us", "re_c1", "im_c1", "re_c2", "im_c2", "re_c3", "im_c3", "p1", "p2", "p3")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    if x is None:
        return ""
    return str(x)


def jsonable(x):
    """Recursively convert numpy scalars/arrays and non-finite floats for ``json``."""
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    return x


def write_csv(path, columns, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(jsonable(obj), indent=2, sort_keys=False) + "\n")
    return path


def pulse_rows(pulses, n: int = 401):
    t, wp, ws = pulses.sample(n)
    return list(zip(t, wp, ws))


def trajectory_rows(traj):
    s, p = traj.states, traj.populations
    return [
        (t, s[i, 0].real, s[i, 0].imag, s[i, 1].real, s[i, 1].imag, s[i, 2].real, s[i, 2].imag,
         p[i, 0], p[i, 1], p[i, 2])
        for i, t in enumerate(traj.times)
    ]


def _to_float(v: str) -> float:
    try:
        return float(v)
    except ValueError:
        return math.nan


def read_csv(path) -> tuple[list[str], np.ndarray]:
    """Header and numeric body; empty or text cells (e.g. error messages) become NaN."""
    with Path(path).open() as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array([[_to_float(v) for v in r] for r in rows[1:]])
