"""CSV / JSON output for study reports.

Files written to the output directory:

``delta_summary.csv``
    scenario, N, method, delta1_mean, delta1_sd, delta2_mean, delta2_sd;
    one row per cell for every method that carries power parameters.
``estimation_summary.csv``
    scenario, N, method, treatment, bias, rmse, abs_bias; one row per
    treatment plus a ``treatment=ALL`` row averaging each column over the
    three treatments, so its ``abs_bias`` is the mean absolute bias and its
    ``rmse`` the mean rMSE.
``delta_draws.csv``
    scenario, N, method, replication, delta1, delta2 (optional).
``study_meta.json``
    config echo, seed, exclusions, package versions and wall time.

Floats are written with ``repr`` so they parse back to the same double.
"""

import csv
import json
import os
import platform
from importlib import metadata

import numpy as np

from .errors import DataError

__all__ = [
    "DELTA_SUMMARY_COLUMNS",
    "ESTIMATION_SUMMARY_COLUMNS",
    "DELTA_DRAWS_COLUMNS",
    "write_reports",
    "read_reports",
    "validate_reports",
]

DELTA_SUMMARY_COLUMNS = ("scenario", "N", "method", "delta1_mean", "delta1_sd",
                         "delta2_mean", "delta2_sd")
ESTIMATION_SUMMARY_COLUMNS = ("scenario", "N", "method", "treatment", "bias", "rmse", "abs_bias")
DELTA_DRAWS_COLUMNS = ("scenario", "N", "method", "replication", "delta1", "delta2")

_FLOAT_COLUMNS = {"delta1_mean", "delta1_sd", "delta2_mean", "delta2_sd",
                  "bias", "rmse", "abs_bias", "delta1", "delta2"}
_INT_COLUMNS = {"N", "replication"}


def _f(x):
    return repr(float(x))


def _write_csv(path, columns, rows):
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n", quoting=csv.QUOTE_MINIMAL)
            w.writerow(columns)
            w.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _versions():
    out = {"python": platform.python_version()}
    for pkg in ("artifact", "numpy", "scipy", "numba"):
        try:
            out[pkg] = metadata.version(pkg)
        except metadata.PackageNotFoundError:
            out[pkg] = None
    return out


def write_reports(report, out_dir):
    """Write the report files and return their paths."""
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out_dir}: {exc.strerror or exc}") from exc
    paths = {}

    rows = [(c.scenario, c.n_total, c.method, _f(c.delta_mean[0]), _f(c.delta_sd[0]),
             _f(c.delta_mean[1]), _f(c.delta_sd[1]))
            for c in report.cells if c.delta_mean is not None]
    paths["delta_summary"] = os.path.join(out_dir, "delta_summary.csv")
    _write_csv(paths["delta_summary"], DELTA_SUMMARY_COLUMNS, rows)

    rows = []
    for c in report.cells:
        for t, b, r in zip("ABC", c.bias, c.rmse):
            rows.append((c.scenario, c.n_total, c.method, t, _f(b), _f(r), _f(abs(b))))
        rows.append((c.scenario, c.n_total, c.method, "ALL", _f(np.mean(c.bias)),
                     _f(c.mean_rmse), _f(c.mean_abs_bias)))
    paths["estimation_summary"] = os.path.join(out_dir, "estimation_summary.csv")
    _write_csv(paths["estimation_summary"], ESTIMATION_SUMMARY_COLUMNS, rows)

    if report.config.write_delta_draws:
        rows = []
        for c in report.cells:
            key = (c.scenario, c.n_total, c.method)
            if key in report.delta_draws:
                reps, d = report.delta_draws[key]
                rows.extend((c.scenario, c.n_total, c.method, int(r), _f(v[0]), _f(v[1]))
                            for r, v in zip(reps, d))
        paths["delta_draws"] = os.path.join(out_dir, "delta_draws.csv")
        _write_csv(paths["delta_draws"], DELTA_DRAWS_COLUMNS, rows)

    meta = {
        "config": report.config.to_dict(),
        "master_seed": report.config.master_seed,
        "excluded": {f"{s}|{n}": [{"replication": r, "error": msg} for r, msg in v]
                     for (s, n), v in report.excluded.items()},
        "wall_time_seconds": report.wall_time,
        "versions": _versions(),
    }
    paths["study_meta"] = os.path.join(out_dir, "study_meta.json")
    try:
        with open(paths["study_meta"], "w") as fh:
            json.dump(meta, fh, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write {paths['study_meta']}: {exc.strerror or exc}") from exc
    return paths


def _read_csv(path, columns):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != columns:
            raise DataError(f"{path}: expected header {','.join(columns)}, got {header}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(columns):
                raise DataError(f"{path}: row {lineno} has {len(row)} fields, expected {len(columns)}")
            rec = {}
            for col, val in zip(columns, row):
                try:
                    if col in _FLOAT_COLUMNS:
                        rec[col] = float(val)
                    elif col in _INT_COLUMNS:
                        rec[col] = int(val)
                    else:
                        rec[col] = val
                except ValueError:
                    raise DataError(f"{path}: row {lineno} column {col} has bad value {val!r}") from None
            rows.append(rec)
    return rows


def read_reports(out_dir):
    """Parse the CSV files written by ``write_reports`` into lists of dicts."""
    out = {
        "delta_summary": _read_csv(os.path.join(out_dir, "delta_summary.csv"), DELTA_SUMMARY_COLUMNS),
        "estimation_summary": _read_csv(os.path.join(out_dir, "estimation_summary.csv"),
                                        ESTIMATION_SUMMARY_COLUMNS),
    }
    draws = os.path.join(out_dir, "delta_draws.csv")
    if os.path.exists(draws):
        out["delta_draws"] = _read_csv(draws, DELTA_DRAWS_COLUMNS)
    return out


def validate_reports(out_dir):
    """Check headers, types and value ranges of a report directory; raise ``DataError``."""
    data = read_reports(out_dir)
    for row in data["delta_summary"]:
        for col in ("delta1_mean", "delta2_mean"):
            if not 0.0 <= row[col] <= 1.0:
                raise DataError(f"delta_summary: {col}={row[col]} outside [0, 1]")
        for col in ("delta1_sd", "delta2_sd"):
            if not row[col] >= 0.0:
                raise DataError(f"delta_summary: {col}={row[col]} is negative")
    for row in data["estimation_summary"]:
        if row["treatment"] not in ("A", "B", "C", "ALL"):
            raise DataError(f"estimation_summary: bad treatment {row['treatment']!r}")
        if not row["rmse"] >= 0.0 or not row["abs_bias"] >= 0.0:
            raise DataError("estimation_summary: negative rmse or abs_bias")
        if row["rmse"] < row["abs_bias"] * (1.0 - 1e-12):
            raise DataError(f"estimation_summary: rmse {row['rmse']} < |bias| {row['abs_bias']}")
    for row in data.get("delta_draws", []):
        if not (0.0 <= row["delta1"] <= 1.0 and 0.0 <= row["delta2"] <= 1.0):
            raise DataError("delta_draws: power parameter outside [0, 1]")
    with open(os.path.join(out_dir, "study_meta.json")) as fh:
        meta = json.load(fh)
    for key in ("config", "master_seed", "versions"):
        if key not in meta:
            raise DataError(f"study_meta.json: missing {key!r}")
    return data
