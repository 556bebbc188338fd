"""Shared helpers for the figure scripts: write a config, run a subcommand."""

import json
from pathlib import Path

from rotbec.io_cli.main import run


def run_task(task: str, out: Path, body: dict, extra_args=()) -> int:
    """Write ``out/<task>.json`` and run the subcommand into ``out``; return its exit code."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = out.parent / f"{out.name}.config.json"
    cfg.write_text(json.dumps({"task": task, **body}, indent=2) + "\n")
    code = run([task, "--config", str(cfg), "--out", str(out), *extra_args])
    print(f"{task} -> {out} (exit {code})")
    return code


def finished_ok(out: Path) -> bool:
    man = Path(out) / "manifest.json"
    return man.exists() and json.loads(man.read_text()).get("status") == "ok"
