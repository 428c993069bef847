"""CSV and JSON writers.  Column orders are part of the file contracts."""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

SPECTRUM_COLUMNS = ("kx_over_kmax", "band_n", "E_over_hbar_omega_max")
DENSITY_COLUMNS = ("y", "n", "density")
POTENTIAL_COLUMNS = ("y", "V")
EIGEN_COLUMNS = ("n", "E_numeric", "E_analytic", "rel_error")
EVOLUTION_COLUMNS = ("t", "survival_plus", "survival_minus", "width_plus",
                     "width_minus", "norm_total")
THERMAL_COLUMNS = ("E_J", "E_over_hbar_omega_ref", "density")
CONVERGENCE_COLUMNS = ("n_points", "spacing", "max_rel_error", "ratio")


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_csv(path, columns, rows, comments=()) -> Path:
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for c in comments:
            fh.write(f"# {c}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def read_csv(path):
    """Header and rows (as floats) of a file written by :func:`write_csv`."""
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, [[float(x) for x in row] for row in reader]


def spectrum_rows(scan):
    x = scan.kx_over_kmax
    for n, band in enumerate(scan.bands):
        for xi, e in zip(x, band):
            yield xi, n, e


def write_json(path, payload) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=_json_default)
                    + "\n", encoding="utf-8")
    return path


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not JSON serializable: {type(o).__name__}")
