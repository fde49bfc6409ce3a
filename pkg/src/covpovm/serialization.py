"""JSON and CSV encodings of matrices, phase-space functions and multiplier tables."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .groups import GroupSpec

SCHEMA_VERSION = "1.0"


def matrix_to_json(m) -> list[list[list[float]]]:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError("matrix JSON must be an array of rows of [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def vector_to_json(v) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(v, dtype=complex).reshape(-1)]


def vector_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        return arr.astype(complex)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("vector JSON must be a list of numbers or of [re, im] pairs")
    return arr[:, 0] + 1j * arr[:, 1]


# a phase-space function is a flat list in phase-point order
phase_function_to_json = vector_to_json
phase_function_from_json = vector_from_json


def load_json(path) -> object:
    with open(Path(path), encoding="utf-8") as fh:
        return json.load(fh)


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def dumps(obj) -> str:
    """UTF-8 JSON with sorted keys, so equal inputs give byte-identical text."""
    return json.dumps(_clean(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def multiplier_rows(spec: GroupSpec, values) -> list[dict]:
    d = spec.order
    rows = []
    for idx, f in enumerate(np.asarray(values, dtype=complex)):
        a, i = divmod(idx, d)
        rows.append(
            {
                "chi_coords": " ".join(str(int(c)) for c in spec.coords[a]),
                "g_coords": " ".join(str(int(c)) for c in spec.coords[i]),
                "re_f": float(f.real),
                "im_f": float(f.imag),
                "abs_f": float(abs(f)),
            }
        )
    return rows


def multiplier_table_to_csv(table) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["chi_coords", "g_coords", "re_f", "im_f", "abs_f"], lineterminator="\n")
    writer.writeheader()
    writer.writerows(multiplier_rows(table.spec, table.values))
    return buf.getvalue()


def multiplier_table_to_dict(table) -> dict:
    return {
        "group": list(table.spec.factors),
        "min_modulus": table.min_modulus,
        "max_residual": table.max_residual,
        "values": multiplier_rows(table.spec, table.values),
    }


def rows_to_csv(rows: list[dict], fieldnames: list[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
