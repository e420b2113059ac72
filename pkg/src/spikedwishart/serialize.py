"""Sample batches on disk: CSV of draws plus a JSON sidecar.

One CSV row per draw, columns the ordered values; floats printed with 17
significant digits so a reread reproduces the bits.  The sidecar carries
everything needed to regenerate the file: ensemble parameters, seed,
construction tag, and column names.  No timestamps, so reruns are
byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InputDomainError

_FLOAT_FMT = "%.17g"


def write_samples_csv(path, values: np.ndarray, columns: list[str]) -> None:
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[1] != len(columns):
        raise InputDomainError("values must be 2-D with one column name per column")
    header = ",".join(columns)
    np.savetxt(path, values, delimiter=",", header=header, comments="", fmt=_FLOAT_FMT)


def read_samples_csv(path) -> tuple[np.ndarray, list[str]]:
    with open(path, "r", encoding="utf-8") as fh:
        columns = fh.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return data, columns


def write_sidecar(path, *, construction: str, seed: int, n_samples: int, columns: list[str], params: dict) -> None:
    payload = {
        "construction": construction,
        "seed": int(seed),
        "n_samples": int(n_samples),
        "columns": list(columns),
        "params": params,
        "format": "csv",
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_sidecar(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_report(path, report: dict) -> None:
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def write_curve_csv(path, columns: dict[str, np.ndarray]) -> None:
    names = list(columns)
    data = np.column_stack([np.asarray(columns[name], dtype=float) for name in names])
    np.savetxt(path, data, delimiter=",", header=",".join(names), comments="", fmt=_FLOAT_FMT)
