"""Reading and writing datasets as JSON or CSV.

JSON is the canonical format::

    {
      "schema_version": "1",
      "x": [1, 2, 3],
      "y": [2.0, 3.0, 2.6],
      "covariance": [[...], [...], [...]],
      "models": [{"name": "M1", "values": [2.3, 2.44, 2.18]}],
      "labels": ["a", "b", "c"],
      "x_label": "x",
      "y_label": "y"
    }

CSV is a wide table with header ``x,y,cov0,...,covN-1``; row ``i`` holds
``x[i]``, ``y[i]`` and covariance row ``i``. It carries no models.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from pathlib import Path

import jsonschema
import numpy as np

from corrviz.errors import ParseError, ValidationError
from corrviz.linalg import SYMMETRY_RTOL
from corrviz.stats import DataSet

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1"
FORMATS = ("json", "csv")

_NUMBERS = {"type": "array", "items": {"type": "number"}}

DATASET_SCHEMA = {
    "title": "corrviz dataset",
    "type": "object",
    "properties": {
        "schema_version": {"type": "string"},
        "x": {**_NUMBERS, "minItems": 1},
        "y": _NUMBERS,
        "covariance": {"type": "array", "items": _NUMBERS},
        "models": {
            "type": "array",
            "items": {
                "type": "object",
                "properties": {"name": {"type": "string"}, "values": _NUMBERS},
                "required": ["name", "values"],
                "additionalProperties": False,
            },
        },
        "labels": {"type": "array", "items": {"type": "string"}},
        "x_label": {"type": "string"},
        "y_label": {"type": "string"},
    },
    "required": ["schema_version", "x", "y", "covariance"],
    "additionalProperties": False,
}


def format_for_path(path) -> str:
    return "csv" if Path(path).suffix.lower() == ".csv" else "json"


def load_dataset(source, fmt: str | None = None) -> DataSet:
    """Load a dataset from a file path (``Path``) or from text (``str``).

    The format defaults to the file suffix for paths and to JSON for text.
    """
    if isinstance(source, os.PathLike):
        fmt = fmt or format_for_path(source)
        text = Path(source).read_text(encoding="utf-8")
    else:
        fmt = fmt or "json"
        text = source
    if fmt == "json":
        return _from_json(text)
    if fmt == "csv":
        return _from_csv(text)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def save_dataset(dataset: DataSet, fmt: str = "json") -> str:
    """Serialize ``dataset``; floats are written in shortest round-trip form."""
    if fmt == "json":
        return _to_json(dataset)
    if fmt == "csv":
        return _to_csv(dataset)
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def _warn_if_asymmetric(cov: np.ndarray) -> np.ndarray:
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        return cov
    asym = np.abs(cov - cov.T)
    worst = asym.max() if asym.size else 0.0
    if 0 < worst <= SYMMETRY_RTOL * np.max(np.abs(cov)):
        i, j = np.unravel_index(np.argmax(asym), asym.shape)
        logger.warning(
            "covariance symmetrized; largest asymmetry %.3g at [%d][%d]", worst, i, j
        )
    return cov


def _from_json(text: str) -> DataSet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    try:
        jsonschema.validate(data, DATASET_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"{where}: {exc.message}") from None
    if data["schema_version"] != SCHEMA_VERSION:
        raise ValidationError(
            f"schema_version: unsupported version {data['schema_version']!r}, "
            f"expected {SCHEMA_VERSION!r}"
        )
    rows = data["covariance"]
    n = len(data["x"])
    if len(rows) != n:
        raise ValidationError(f"covariance has {len(rows)} rows, expected {n}")
    for i, row in enumerate(rows):
        if len(row) != n:
            raise ValidationError(f"covariance[{i}] has {len(row)} entries, expected {n}")
    return DataSet(
        x=data["x"],
        y=data["y"],
        cov=_warn_if_asymmetric(np.array(rows, dtype=float)),
        models=tuple((m["name"], m["values"]) for m in data.get("models", [])),
        labels=data.get("labels"),
        x_label=data.get("x_label"),
        y_label=data.get("y_label"),
    )


def _to_json(dataset: DataSet) -> str:
    out = {
        "schema_version": SCHEMA_VERSION,
        "x": dataset.x.tolist(),
        "y": dataset.y.tolist(),
        "covariance": dataset.cov.tolist(),
    }
    if dataset.models:
        out["models"] = [{"name": name, "values": v.tolist()} for name, v in dataset.models]
    if dataset.labels is not None:
        out["labels"] = list(dataset.labels)
    if dataset.x_label is not None:
        out["x_label"] = dataset.x_label
    if dataset.y_label is not None:
        out["y_label"] = dataset.y_label
    return json.dumps(out, indent=2) + "\n"


def _from_csv(text: str) -> DataSet:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("empty CSV input") from None
    header = [h.strip() for h in header]
    n = len(header) - 2
    expected = ["x", "y"] + [f"cov{k}" for k in range(n)]
    if n < 1 or header != expected:
        raise ParseError(f"line 1: expected header {','.join(expected[:3])}..., got {','.join(header)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != n + 2:
            raise ParseError(f"line {lineno}: expected {n + 2} fields, got {len(row)}")
        try:
            rows.append([float(cell) for cell in row])
        except ValueError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    if len(rows) != n:
        raise ValidationError(f"covariance has {n} columns but the file has {len(rows)} rows")
    table = np.array(rows)
    return DataSet(x=table[:, 0], y=table[:, 1], cov=_warn_if_asymmetric(table[:, 2:]))


def _to_csv(dataset: DataSet) -> str:
    if dataset.models:
        raise ValueError("CSV cannot store models; use JSON")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["x", "y"] + [f"cov{k}" for k in range(dataset.n)])
    for i in range(dataset.n):
        row = [dataset.x[i], dataset.y[i], *dataset.cov[i]]
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()
