"""Deterministic CSV/JSON writers shared by orbit export, snapshot dumps and the CLI."""

from __future__ import annotations

import io
import json
import math
from pathlib import Path
from typing import IO, Any, Iterable, Sequence

import numpy as np

FLOAT_FORMAT = "%.17g"


def fmt(x: float) -> str:
    return FLOAT_FORMAT % (float(x) + 0.0)


def csv_text(header: Sequence[str], columns: Iterable[np.ndarray]) -> str:
    cols = [np.asarray(c, dtype=float).ravel() for c in columns]
    n = {len(c) for c in cols}
    if len(n) != 1:
        raise ValueError("CSV columns must have equal length")
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in zip(*cols):
        buf.write(",".join(FLOAT_FORMAT % (x + 0.0) for x in row))
        buf.write("\n")
    return buf.getvalue()


def write_csv(target: str | Path | IO[str], header: Sequence[str], columns: Iterable[np.ndarray]) -> None:
    text = csv_text(header, columns)
    if isinstance(target, (str, Path)):
        path = Path(target)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    else:
        target.write(text)


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            # round-trip through the fixed 17-digit format for byte stability
            return float(FLOAT_FORMAT % x)
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


def json_text(payload: Any) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


def write_json(target: str | Path | IO[str], payload: Any) -> None:
    text = json_text(payload)
    if isinstance(target, (str, Path)):
        path = Path(target)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    else:
        target.write(text)
