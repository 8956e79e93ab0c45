"""CSV and JSON serialization for distribution tables, verification reports and run summaries."""

from __future__ import annotations

import csv
import json
import os
from pathlib import Path

import numpy as np

from .dist_core import Cdf, GridMeasure, Law
from .errors import ContractError

SCHEMA_VERSION = 1


def _ensure_parent(path) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def table_grid(cdf: Cdf, n: int = 512) -> np.ndarray:
    """Abscissas for a CDF table: the support endpoints plus quantile-spaced interior points."""
    lo, hi = cdf.support_hint
    p0 = float(cdf.atom_zero) if cdf.is_positive else 0.0
    p = p0 + (1.0 - p0) * (np.arange(n) + 0.5) / n
    x = np.asarray(cdf.quantile(p), dtype=float)
    pts = [x[np.isfinite(x)]]
    pts.append(np.array([v for v in (lo, hi) if np.isfinite(v)]))
    return np.unique(np.concatenate(pts))


def write_cdf_table(path, x, cdf_values, density=None) -> Path:
    """Write ``x,cdf,density``; missing densities are written as ``nan``."""
    x = np.asarray(x, dtype=float)
    cdf_values = np.asarray(cdf_values, dtype=float)
    dens = np.full(x.shape, np.nan) if density is None else np.asarray(density, dtype=float)
    if not (x.shape == cdf_values.shape == dens.shape):
        raise ContractError("x, cdf and density columns must have equal length")
    path = _ensure_parent(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x", "cdf", "density"])
        for row in zip(x, cdf_values, dens):
            w.writerow([repr(float(v)) for v in row])
    return path


def difference_density(x, cdf_values, jumps=()):
    """Central-difference density of a tabulated CDF; ``nan`` at the ends and next to jumps."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(cdf_values, dtype=float)
    dens = np.full(x.shape, np.nan)
    if x.size < 3:
        return dens
    dens[1:-1] = (y[2:] - y[:-2]) / (x[2:] - x[:-2])
    for j in jumps:
        k = np.searchsorted(x, j)
        dens[max(k - 1, 0) : k + 2] = np.nan
    return dens


def write_atoms(path, atoms) -> Path:
    """Write ``location,mass`` rows."""
    path = _ensure_parent(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["location", "mass"])
        for loc, mass in atoms:
            w.writerow([repr(float(loc)), repr(float(mass))])
    return path


def read_cdf_table(path, atom_zero=None) -> Cdf:
    """Re-ingest an ``x,cdf,density`` table as a piecewise-linear :class:`Cdf`.

    The interpolant reproduces the stored values exactly at the stored
    abscissas.  The atom at 0 defaults to the tabulated value at ``x = 0``
    when that row exists.
    """
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows:
        raise ContractError(f"{path}: empty CDF table")
    x = np.array([float(r["x"]) for r in rows])
    y = np.array([float(r["cdf"]) for r in rows])
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    if np.any(np.diff(y) < -1e-15):
        raise ContractError(f"{path}: cdf column is not nondecreasing")
    if atom_zero is None:
        atom_zero = float(y[0]) if x[0] == 0.0 else 0.0
    lo_val = 0.0 if x[0] > 0 or x[0] < 0 else float(y[0])
    positive = x[0] >= 0

    def ev(t):
        t_arr = np.asarray(t, dtype=float)
        val = np.interp(t_arr, x, y, left=lo_val, right=1.0)
        if positive:
            val = np.where(t_arr < 0, 0.0, val)
        return float(val) if np.ndim(t) == 0 else val

    return Cdf(ev, float(atom_zero), (float(x[0]), float(x[-1])), None, (), f"table:{os.path.basename(str(path))}")


def export_distribution(obj, directory, stem: str, n: int = 512) -> dict:
    """Write the CDF table of ``obj`` and, for measures, its atom list.

    Returns a mapping from artifact kind to written path.
    """
    directory = Path(directory)
    out = {}
    if isinstance(obj, (Law, GridMeasure)):
        cdf = obj.to_cdf()
        atoms = obj.all_atoms() if isinstance(obj, GridMeasure) else obj.atoms()
        density_fn = obj.pdf
    elif isinstance(obj, Cdf):
        cdf, atoms, density_fn = obj, (), None
    else:
        raise ContractError(f"cannot export {type(obj).__name__}")
    x = table_grid(cdf, n)
    dens = None
    if density_fn is not None:
        with np.errstate(all="ignore"):
            dens = np.asarray(density_fn(x), dtype=float)
    out["cdf"] = str(write_cdf_table(directory / f"{stem}_cdf.csv", x, cdf(x), dens))
    if atoms:
        out["atoms"] = str(write_atoms(directory / f"{stem}_atoms.csv", atoms))
    return out


def write_json(path, payload: dict) -> Path:
    """Write ``payload`` with the schema version attached, non-finite floats as strings."""
    path = _ensure_parent(path)
    record = {"schema_version": SCHEMA_VERSION}
    record.update(payload)
    with open(path, "w") as fh:
        json.dump(_jsonable(record), fh, indent=2)
    return path


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


def error_record(kind: str, message: str, exit_code: int) -> dict:
    return {"schema_version": SCHEMA_VERSION, "status": "error", "error": kind, "message": message,
            "exit_code": int(exit_code)}
