"""Density and phase at z = 0 along the eps_dd ramp (Omega = 3, gamma = 1).

Runs sim-ramp into OUT/ramp (reused when a finished run is already there)
and renders each density slice as a PGM next to its CSV.  Hours-scale at the
default 64^3 grid.
"""

import argparse
from pathlib import Path

import numpy as np

from _common import finished_ok, run_task
from rotbec.io_cli.output import pgm_bytes, write_atomic

RAMP = {
    "params": {"gamma": 1.0, "omega": 3.0, "eps_dd": 0.0, "interaction_scale": 1500.0},
    "grid": {"n": 64, "d": 0.3},
    "ramp": {"rate": 1e-3, "eps_start": 0.0, "eps_stop": 0.2, "amplitude": 0.05,
             "dt": 0.004, "sample_every": 250, "checkpoints": [0.05, 0.15, 0.2]},
}


def ensure_ramp(out: Path, n: int, seed: int) -> int:
    if finished_ok(out):
        print(f"reusing {out}")
        return 0
    body = dict(RAMP, grid={"n": n, "d": RAMP["grid"]["d"] * 64 / n})
    return run_task("sim-ramp", out, body, ["--seed", str(seed)])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--n", type=int, default=64, help="grid points per axis (box kept fixed)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = args.out / "ramp"
    code = ensure_ramp(out, args.n, args.seed)
    for path in sorted(out.glob("slice_eps*_density.csv")):
        dens = np.loadtxt(path, delimiter=",")
        write_atomic(path.with_suffix(".pgm"), pgm_bytes(dens))
        print(f"wrote {path.with_suffix('.pgm')}")
    raise SystemExit(code)


if __name__ == "__main__":
    main()
