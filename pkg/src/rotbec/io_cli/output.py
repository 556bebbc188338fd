"""Deterministic CSV / PGM writers and the per-run manifest."""

from __future__ import annotations

import csv
import datetime as _dt
import hashlib
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np


def format_value(v) -> str:
    """Shortest round-trip text for floats; empty field for missing values."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        f = float(v)
        if not math.isfinite(f):
            return ""
        return repr(f)
    return str(v)


def csv_bytes(header: Sequence[str], rows: Iterable[Sequence]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_value(v) for v in r])
    return buf.getvalue().encode("utf-8")


def write_atomic(path, data: bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=path.suffix)
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_csv(path, header, rows) -> Path:
    return write_atomic(path, csv_bytes(header, rows))


def matrix_csv_bytes(mat: np.ndarray, axis_values: np.ndarray | None = None) -> bytes:
    """2D array as CSV; with ``axis_values`` the first row/column carry coordinates."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if axis_values is not None:
        w.writerow([""] + [format_value(v) for v in axis_values])
        for v, row in zip(axis_values, mat):
            w.writerow([format_value(v)] + [format_value(x) for x in row])
    else:
        for row in mat:
            w.writerow([format_value(x) for x in row])
    return buf.getvalue().encode("utf-8")


def pgm_bytes(values: np.ndarray, maxval: int = 255) -> bytes:
    """Plain-text (P2) greyscale image, scaled so the largest finite value is white.

    Missing (NaN) cells and zeros are black.
    """
    a = np.asarray(values, dtype=float)
    if a.ndim != 2:
        raise ValueError("PGM needs a 2D array")
    finite = np.where(np.isfinite(a), a, 0.0)
    top = float(finite.max()) if finite.size else 0.0
    if top > 0:
        pix = np.rint(np.clip(finite / top, 0.0, 1.0) * maxval).astype(int)
    else:
        pix = np.zeros(a.shape, dtype=int)
    lines = ["P2", f"{a.shape[1]} {a.shape[0]}", str(maxval)]
    lines += [" ".join(str(p) for p in row) for row in pix]
    return ("\n".join(lines) + "\n").encode("ascii")


def sha256_of(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


class RunManifest:
    """Collects outputs and diagnostics of one run; written atomically at the end."""

    def __init__(self, out_dir, config: dict, command: str, version: str):
        self.out_dir = Path(out_dir)
        self.config = config
        self.command = command
        self.version = version
        self.started = _now()
        self.finished = None
        self.outputs: list[str] = []
        self.diagnostics: dict = {}
        self.warnings: list[str] = []
        self.status = "running"

    def add_bytes(self, name: str, data: bytes) -> Path:
        path = write_atomic(self.out_dir / name, data)
        self._register(name)
        return path

    def add_file(self, name: str) -> Path:
        """Register a file the caller has already written inside ``out_dir``."""
        self._register(name)
        return self.out_dir / name

    def _register(self, name):
        if name not in self.outputs:
            self.outputs.append(name)

    def to_dict(self) -> dict:
        return {
            "artifact": "rotbec",
            "version": self.version,
            "command": self.command,
            "config": self.config,
            "started": self.started,
            "finished": self.finished,
            "status": self.status,
            "diagnostics": self.diagnostics,
            "warnings": self.warnings,
            "outputs": [
                {"path": n, "sha256": sha256_of(self.out_dir / n),
                 "bytes": (self.out_dir / n).stat().st_size}
                for n in sorted(self.outputs)
            ],
        }

    def write(self, status: str) -> Path:
        self.status = status
        self.finished = _now()
        text = json.dumps(_jsonable(self.to_dict()), indent=2, sort_keys=True) + "\n"
        return write_atomic(self.out_dir / "manifest.json", text.encode("utf-8"))


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj
