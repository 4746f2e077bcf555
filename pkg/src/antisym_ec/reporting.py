"""Serialization of reports with every float written at 17 significant digits."""

import csv
import io
import json
import math

import numpy as np


def _format_float(x):
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x, ".17g")
    # keep floats recognizable as floats after a round trip
    if all(c in "-0123456789" for c in text):
        text += ".0"
    return text


def _encode(obj, out):
    if obj is None:
        out.append("null")
    elif isinstance(obj, (bool, np.bool_)):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_format_float(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            _encode(str(k), out)
            out.append(": ")
            _encode(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple, np.ndarray)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _encode(v, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    """JSON text for ``obj``; floats use 17 significant digits."""
    out = []
    _encode(obj, out)
    return "".join(out)


def to_jsonl(records):
    return "".join(dumps(r) + "\n" for r in records)


def to_csv(records):
    """CSV for flat records; nested values are embedded as JSON text."""
    if not records:
        return ""
    fields = []
    for r in records:
        for k in r:
            if k not in fields:
                fields.append(k)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for r in records:
        row = []
        for k in fields:
            v = r.get(k)
            if isinstance(v, (float, np.floating)):
                row.append(format(float(v), ".17g"))
            elif isinstance(v, (dict, list, tuple)):
                row.append(dumps(v))
            elif v is None:
                row.append("")
            else:
                row.append(v)
        writer.writerow(row)
    return buf.getvalue()


def render(records, summary, fmt):
    """Render per-sample records plus a summary record in ``json``, ``jsonl`` or ``csv``."""
    if fmt == "json":
        return dumps({"records": list(records), "summary": summary}) + "\n"
    if fmt == "jsonl":
        return to_jsonl(list(records) + [summary])
    if fmt == "csv":
        return to_csv(list(records)) + "# summary " + dumps(summary) + "\n"
    raise ValueError(f"unknown format {fmt!r}")
