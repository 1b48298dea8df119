"""
Result table writers (CSV and JSON with stable float rendering)
"""

import csv
import io
import json
import math
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

import numpy as np

from .error_handler import FileOperationError

FLOAT_FORMAT = "{:.17g}"


def format_float(value: float) -> str:
    """17 significant digits; round-trips exactly through float()"""
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "Infinity" if value > 0 else "-Infinity"
    return FLOAT_FORMAT.format(value)


def _plain(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Path):
        return str(value)
    return value


def row_dict(row: Any) -> Dict[str, Any]:
    """Dataclass or mapping -> flat dict of plain values"""
    data = asdict(row) if is_dataclass(row) else dict(row)
    return {key: _plain(value) for key, value in data.items()}


def _json_scalar(value: Any) -> str:
    value = _plain(value)
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        return format_float(value) if math.isfinite(value) else "null"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_scalar(v) for v in value) + "]"
    if isinstance(value, Mapping):
        return dumps_fixed(value)
    return json.dumps(value)


def dumps_fixed(mapping: Mapping[str, Any]) -> str:
    """JSON object with keys in insertion order and 17-digit floats; inf and nan become null"""
    return "{" + ", ".join(f"{json.dumps(str(k))}: {_json_scalar(v)}" for k, v in mapping.items()) + "}"


def rows_to_json(rows: Iterable[Any]) -> str:
    """JSON array, one object per row"""
    return "[\n" + ",\n".join("  " + dumps_fixed(row_dict(r)) for r in rows) + "\n]"


def rows_to_csv(rows: Sequence[Any], columns: Optional[List[str]] = None) -> str:
    """CSV text with a header row"""
    dicts = [row_dict(r) for r in rows]
    if columns is None:
        columns = list(dicts[0].keys()) if dicts else []

    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    for d in dicts:
        writer.writerow({k: format_float(v) if isinstance(v, float) else v for k, v in d.items()})
    return buffer.getvalue()


def write_table(rows: Sequence[Any], output_path: Optional[str], fmt: str = "csv") -> str:
    """
    Render rows as CSV or JSON and write them to output_path (stdout when None)

    Returns:
        The rendered text
    """
    text = rows_to_json(rows) + "\n" if fmt == "json" else rows_to_csv(rows)
    if output_path:
        try:
            Path(output_path).expanduser().write_text(text, encoding="utf-8")
        except OSError as e:
            raise FileOperationError(f"Cannot write {output_path}: {e}")
    return text
