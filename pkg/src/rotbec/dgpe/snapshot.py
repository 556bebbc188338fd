"""Field snapshots: raw little-endian complex128 data plus a JSON sidecar header."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..core_model import SystemParams
from ..errors import DomainError
from .grid import FieldState, SimGrid

FORMAT = "rotbec-field-v1"


def save_snapshot(state: FieldState, path, seed: int | None = None) -> tuple[Path, Path]:
    """Write ``<path>.bin`` (C order, axes x, y, z) and ``<path>.json``."""
    base = Path(path)
    data, head = base.with_suffix(".bin"), base.with_suffix(".json")
    np.ascontiguousarray(state.psi, dtype="<c16").tofile(data)
    header = {
        "format": FORMAT,
        "grid": state.grid.to_dict(),
        "t": float(state.t),
        "eps_dd": float(state.params.eps_dd),
        "params": dict(state.params.__dict__),
        "seed": seed,
        "dtype": "complex128-le",
        "order": "C (x, y, z)",
    }
    head.write_text(json.dumps(header, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return data, head


def load_snapshot(path) -> FieldState:
    base = Path(path)
    header = json.loads(base.with_suffix(".json").read_text(encoding="utf-8"))
    if header.get("format") != FORMAT:
        raise DomainError(f"unknown snapshot format {header.get('format')!r}")
    grid = SimGrid(**header["grid"])
    params = SystemParams(**header["params"])
    psi = np.fromfile(base.with_suffix(".bin"), dtype="<c16")
    if psi.size != grid.n ** 3:
        raise DomainError("snapshot data size does not match its header")
    return FieldState(psi.reshape((grid.n,) * 3).astype(np.complex128), grid, params, header["t"])
