"""Deterministic CSV/JSON writers for result artifacts."""
from __future__ import annotations

import csv
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from utils.constants import SIGNIFICANT_DIGITS


def format_float(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating, Fraction)):
        x = float(value)
        if math.isnan(x):
            return "nan"
        return f"{x:.{SIGNIFICANT_DIGITS}g}"
    return str(value)


def _normalize(value: Any) -> Any:
    """Round floats to the output precision so JSON text is stable."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating, Fraction)):
        x = float(value)
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return float(f"{x:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, Mapping):
        return {str(k): _normalize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_normalize(v) for v in value]
    if hasattr(value, "as_dict"):
        return _normalize(value.as_dict())
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Mapping[str, Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([format_float(row.get(column)) for column in columns])
    return path


def dumps_json(payload: Any) -> str:
    return json.dumps(_normalize(payload), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path: Path, payload: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_json(payload), encoding="utf-8")
    return path


__all__ = ["format_float", "write_csv", "write_json", "dumps_json"]
