"""Deterministic JSON and CSV emission for reports."""
import csv
import io
import json
import math

import numpy as np

SCHEMA_ID = "abmetric-report"
SCHEMA_VERSION = "1.0"
FLOAT_FORMAT = ".17g"


def _plain(obj):
    """Numpy scalars and arrays to Python values."""
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def _float(v):
    if not math.isfinite(v):
        raise ValueError(f"non-finite value {v!r} in report")
    text = format(v, FLOAT_FORMAT)
    if all(ch not in text for ch in ".en"):
        text += ".0"
    return text


def _emit(obj, out, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, int):
        out.append(str(obj))
    elif isinstance(obj, float):
        out.append(_float(obj))
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, dict):
        if not obj:
            out.append("{}")
            return
        out.append("{\n")
        for i, key in enumerate(sorted(obj)):
            out.append(f"{pad}{json.dumps(key)}: ")
            _emit(obj[key], out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "}")
    elif isinstance(obj, list):
        if not obj:
            out.append("[]")
            return
        if all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in obj):
            out.append("[")
            for i, v in enumerate(obj):
                _emit(v, out, indent, level)
                if i < len(obj) - 1:
                    out.append(", ")
            out.append("]")
            return
        out.append("[\n")
        for i, v in enumerate(obj):
            out.append(pad)
            _emit(v, out, indent, level + 1)
            out.append(",\n" if i < len(obj) - 1 else "\n")
        out.append(end + "]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent=2):
    """JSON with sorted keys and floats at 17 significant digits."""
    out = []
    _emit(_plain(obj), out, indent, 0)
    return "".join(out) + "\n"


def table_csv(rows):
    """CSV from a list of flat dicts; columns in first-seen order."""
    if not rows:
        return ""
    columns = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _float(v) if isinstance(v, float) else v for k, v in _plain(row).items()})
    return buf.getvalue()


def schema():
    from importlib.resources import files

    return json.loads(files("abmetric").joinpath("data/report.schema.json").read_text())
