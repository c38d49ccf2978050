"""Deterministic file output and the run manifest."""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from pathlib import Path

from . import __version__

MANIFEST = "manifest.json"


def format_float(x) -> str:
    """17 significant digits, so values round-trip exactly."""
    if x is None:
        return "nan"
    x = float(x)
    if math.isnan(x):
        return "nan"
    return f"{x:.16e}"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else str(v) if isinstance(v, int) else format_float(v)
                    for v in row])
    return buf.getvalue()


def json_text(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    try:
        x = float(obj)
    except (TypeError, ValueError):
        return str(obj)
    return x if math.isfinite(x) else None


def read_csv(path) -> tuple[list[str], list[list[float]]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader if row]
    return header, rows


class OutputDir:
    """Collects written files and their checksums for the manifest."""

    def __init__(self, path):
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.files: dict[str, str] = {}

    def write(self, name: str, text: str) -> Path:
        target = self.path / name
        target.parent.mkdir(parents=True, exist_ok=True)
        data = text.encode()
        target.write_bytes(data)
        self.files[name] = hashlib.sha256(data).hexdigest()
        return target

    def write_csv(self, name, header, rows) -> Path:
        return self.write(name, csv_text(header, rows))

    def write_json(self, name, obj) -> Path:
        return self.write(name, json_text(obj))

    def finish(self, command: str, config: dict, wall_clock: float, workers: int) -> Path:
        """Write the manifest.  Timing and worker count live only here, so
        every other file is byte-reproducible."""
        manifest = {
            "tool": "kzbreak",
            "version": __version__,
            "command": command,
            "config": config,
            "files": dict(sorted(self.files.items())),
            "wall_clock_s": wall_clock,
            "workers": workers,
        }
        target = self.path / MANIFEST
        target.write_text(json_text(manifest))
        return target
