"""Shared serialization helpers: stable float formatting and CSV writing."""

import csv
import json
import math
from pathlib import Path

FLOAT_DIGITS = 12


def fmt(x):
    """Format a number with 12 significant digits; NaN becomes an empty field."""
    if x is None:
        return ""
    if isinstance(x, (bool, int)) and not isinstance(x, float):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return ""
    return format(x, f".{FLOAT_DIGITS}g")


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return None
        return float(format(obj, f".{FLOAT_DIGITS}g"))
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):  # numpy scalar
        return _jsonable(obj.item())
    return obj


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(_jsonable(obj), indent=2, sort_keys=True)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def read_rows(path, required):
    """Yield ``(line_number, row_dict)`` from a CSV file after checking its header."""
    from .errors import ParseError

    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ParseError(path, 1, "file is empty") from None
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError(path, 1, f"header lacks column(s) {', '.join(missing)}")
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise ParseError(
                    path, lineno, f"expected {len(header)} columns, got {len(row)}"
                )
            yield lineno, dict(zip(header, (cell.strip() for cell in row)))
