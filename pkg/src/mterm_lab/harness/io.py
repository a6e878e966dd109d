"""CSV/JSON writers with fixed numeric formatting.

Floats are written with 17 significant digits so files round-trip exactly
and identical runs are byte-identical.
"""
from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from pathlib import Path


def fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.17g}"
    if hasattr(v, "item"):
        return fmt(v.item())
    return str(v)


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    _atomic_write(Path(path), "\n".join(lines) + "\n")


def write_json(path, doc) -> None:
    _atomic_write(Path(path), json.dumps(_plain(doc), indent=2, sort_keys=True) + "\n")


def write_text(path, text: str) -> None:
    _atomic_write(Path(path), text)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, float) and (math.isnan(obj) or math.isinf(obj)):
        return fmt(obj)
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return _plain(obj.item())
    return obj


def read_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


def plot_triples(header, rows):
    """Reshape a wide CSV into ``(x, y, series)`` rows; column 0 is x."""
    out = []
    for row in rows:
        x = row[0]
        for name, y in zip(header[1:], row[1:]):
            out.append((x, y, name))
    return out
