"""Command-line entry point: ``rotbec <subcommand> [--config FILE] [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .. import __version__
from ..errors import CapabilityError, DomainError, PreconditionError, RotBecError
from .commands import COMMANDS, EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, EXIT_PARTIAL, PartialRun
from .config import PRESETS, ConfigError, load_config, resolve
from .output import RunManifest, write_atomic

log = logging.getLogger("rotbec")

HELP = {
    "tf-branches": "stationary Thomas-Fermi branches over an Omega grid",
    "tf-bifurcation": "bifurcation rotation frequency Omega_b",
    "timeavg-compare": "fast-rotation aspect ratio against the time-averaged model",
    "stability-spectrum": "linearised spectrum at one parameter point",
    "stability-map": "largest growth rate over an (Omega, eps_dd) grid",
    "sim-ground": "imaginary-time ground state of the 3D simulator",
    "sim-ramp": "ground state followed by a seeded eps_dd ramp in real time",
}


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("thread count must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rotbec",
                                     description="Rotating dipolar condensates: TF branches, "
                                                 "linear stability and 3D simulations.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="task", required=True, metavar="subcommand")
    for name in COMMANDS:
        p = sub.add_parser(name, help=HELP[name], description=HELP[name])
        p.add_argument("--config", type=Path, help="JSON run configuration")
        p.add_argument("--out", type=Path, help="output directory (default from config)")
        p.add_argument("--seed", type=_seed, help="RNG seed")
        p.add_argument("--threads", type=_positive, help="worker threads")
        p.add_argument("--preset", choices=sorted(PRESETS), help="grid preset")
        p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = dict(out=args.out, seed=args.seed, threads=args.threads, preset=args.preset)
    try:
        if args.config is not None:
            cfg = load_config(args.config, **overrides)
            if cfg.task != args.task:
                raise ConfigError(f"config task {cfg.task!r} does not match subcommand "
                                  f"{args.task!r}")
        else:
            cfg = resolve({"task": args.task}, **overrides)
    except ConfigError as exc:
        print(f"rotbec: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out_dir = Path(cfg["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    write_atomic(out_dir / "config.json", cfg.to_json().encode("utf-8"))
    manifest = RunManifest(out_dir, cfg.to_dict(), " ".join(["rotbec", args.task]), __version__)
    manifest.add_file("config.json")
    try:
        code = COMMANDS[args.task](cfg, manifest)
        status = "partial" if code == EXIT_PARTIAL else "ok"
    except (ConfigError, DomainError, CapabilityError, PreconditionError) as exc:
        manifest.diagnostics["error"] = str(exc)
        code, status = EXIT_CONFIG, "config-error"
        print(f"rotbec: configuration error: {exc}", file=sys.stderr)
    except PartialRun as exc:
        manifest.diagnostics["error"] = str(exc)
        code, status = EXIT_NUMERIC, "aborted"
        print(f"rotbec: run aborted, partial outputs kept: {exc}", file=sys.stderr)
    except (RotBecError, ArithmeticError, ValueError) as exc:
        manifest.diagnostics["error"] = f"{type(exc).__name__}: {exc}"
        code, status = EXIT_NUMERIC, "numeric-failure"
        print(f"rotbec: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
    manifest.write(status)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
