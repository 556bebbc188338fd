"""Run configuration: a single JSON document per run.

Schema (all keys optional except ``task``)::

    {
      "task": "tf-branches" | "tf-bifurcation" | "timeavg-compare" |
              "stability-spectrum" | "stability-map" | "sim-ground" | "sim-ramp",
      "params": {"gamma": 1.0, "omega": 0.0, "eps_dd": 0.0, "interaction_scale": 1500.0},
      "omega_values": [..] or {"start": a, "stop": b, "num": n},
      "eps_values":   [..] or {"start": a, "stop": b, "num": n},
      "gamma_values": [..] or {"start": a, "stop": b, "num": n},
      "omega_high": 50.0,
      "n_max": 13,
      "grid": {"n": 64, "d": 0.3, "rc": null},
      "ground": {"tol": 1e-8, "dt": 0.01, "max_time": 200.0},
      "ramp": {"rate": 1e-3, "eps_start": 0.0, "eps_stop": 0.2, "amplitude": 0.05,
               "dt": 0.004, "sample_every": 250, "checkpoints": [0.05, 0.15, 0.2]},
      "seed": 0,
      "threads": 1,
      "preset": "desk" | "paper",   (its Omega/eps grids apply to stability-map only)
      "out": "run_dir"
    }
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

TASKS = ("tf-branches", "tf-bifurcation", "timeavg-compare", "stability-spectrum",
         "stability-map", "sim-ground", "sim-ramp")

PRESETS = {
    "desk": {
        "grid": {"n": 64, "d": 0.3, "rc": None},
        "n_max": 13,
        "omega_values": {"start": 0.5, "stop": 6.0, "num": 12},
        "eps_values": {"start": 0.0, "stop": 0.9, "num": 10},
    },
    "paper": {
        "grid": {"n": 192, "d": 0.15, "rc": None},
        "n_max": 13,
        "omega_values": {"start": 0.1, "stop": 6.0, "num": 60},
        "eps_values": {"start": 0.0, "stop": 0.95, "num": 39},
    },
}

DEFAULTS = {
    "params": {"gamma": 1.0, "omega": 0.0, "eps_dd": 0.0, "interaction_scale": 1500.0},
    "omega_high": 50.0,
    "ground": {"tol": 1e-8, "dt": 0.01, "max_time": 200.0},
    "ramp": {"rate": 1e-3, "eps_start": 0.0, "eps_stop": 0.2, "amplitude": 0.05, "dt": 0.004,
             "sample_every": 250, "checkpoints": [0.05, 0.15, 0.2]},
    "seed": 0,
    "threads": 1,
    "preset": "desk",
    "out": "out",
}


class ConfigError(ValueError):
    """The configuration is malformed or inconsistent (CLI exit code 2)."""


@dataclass
class RunConfig:
    """Fully resolved configuration of one run."""

    task: str
    data: dict = field(default_factory=dict)

    def __getitem__(self, key):
        return self.data[key]

    def get(self, key, default=None):
        return self.data.get(key, default)

    def to_dict(self) -> dict:
        return {"task": self.task, **copy.deepcopy(self.data)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, raw: dict, **overrides) -> "RunConfig":
        return resolve(raw, **overrides)


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for k, v in extra.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def expand_values(spec, name: str) -> list[float]:
    """A list of floats from an explicit list, a scalar or a linspace block."""
    if spec is None:
        raise ConfigError(f"{name} is required for this task")
    if isinstance(spec, dict):
        try:
            start, stop, num = float(spec["start"]), float(spec["stop"]), int(spec["num"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"{name}: linspace block needs start, stop, num") from exc
        if num < 1:
            raise ConfigError(f"{name}: num must be >= 1")
        vals = np.linspace(start, stop, num).tolist()
    elif isinstance(spec, (list, tuple)):
        vals = [float(v) for v in spec]
    elif isinstance(spec, (int, float)):
        vals = [float(spec)]
    else:
        raise ConfigError(f"{name}: expected a list, number or linspace block")
    if not vals:
        raise ConfigError(f"{name} is empty")
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"{name} contains non-finite values")
    return vals


def resolve(raw: dict, *, out=None, seed=None, threads=None, preset=None, task=None) -> RunConfig:
    """Apply defaults, the preset and command-line overrides; validate."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a JSON object")
    task = task or raw.get("task")
    if task not in TASKS:
        raise ConfigError(f"unknown or missing task {task!r}; expected one of {', '.join(TASKS)}")
    preset = preset or raw.get("preset") or DEFAULTS["preset"]
    if preset not in PRESETS:
        raise ConfigError(f"unknown preset {preset!r}")
    chosen = copy.deepcopy(PRESETS[preset])
    if task != "stability-map":
        # preset sweep grids describe the stability map only
        chosen.pop("omega_values")
        chosen.pop("eps_values")
    data = _merge(DEFAULTS, chosen)
    data = _merge(data, {k: v for k, v in raw.items() if k != "task"})
    data["preset"] = preset
    if out is not None:
        data["out"] = str(out)
    if seed is not None:
        data["seed"] = int(seed)
    if threads is not None:
        data["threads"] = int(threads)
    if not isinstance(data["seed"], int) or data["seed"] < 0:
        raise ConfigError("seed must be a non-negative integer")
    if not isinstance(data["threads"], int) or data["threads"] < 1:
        raise ConfigError("threads must be a positive integer")
    unknown = set(data["params"]) - set(DEFAULTS["params"])
    if unknown:
        raise ConfigError(f"unknown params keys: {sorted(unknown)}")
    try:
        data["params"] = {k: float(v) for k, v in data["params"].items()}
        data["n_max"] = int(data["n_max"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad numeric value: {exc}") from exc
    return RunConfig(task, data)


def load_config(path, **overrides) -> RunConfig:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return resolve(raw, **overrides)
