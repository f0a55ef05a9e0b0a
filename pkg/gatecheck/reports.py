"""Report rendering: canonical JSON for every command, CSV for outcome tables."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from .exceptions import ConstructionError

CSV_COLUMNS = ("truth", "outcome_a", "outcome_b", "count")


def to_jsonable(value: Any, path: str = "$") -> Any:
    """Plain Python data with numpy scalars/arrays unwrapped; non-finite numbers are rejected."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v, f"{path}.{k}") for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v, f"{path}[{i}]") for i, v in enumerate(value)]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist(), path)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        if not math.isfinite(number):
            raise ConstructionError(f"report value {path} is not finite: {number!r}")
        return number
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(value.real, f"{path}.re"), to_jsonable(value.imag, f"{path}.im")]
    return value


def render_json(report: dict[str, Any]) -> str:
    return json.dumps(to_jsonable(report), sort_keys=True, allow_nan=False, indent=2) + "\n"


def render_csv(rows: list[dict[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({column: row[column] for column in CSV_COLUMNS})
    return buffer.getvalue()


def write_report(text: str, out: str | Path) -> Path:
    path = Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    return path
