"""Fast-rotation aspect ratio against the time-averaged model for gamma = 0.5, 1, 2."""

import argparse
from pathlib import Path

from _common import run_task


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--num", type=int, default=19, help="eps_dd samples on [0, 0.9]")
    ap.add_argument("--omega-high", type=float, default=50.0)
    args = ap.parse_args()
    code = run_task("timeavg-compare", args.out / "fig2", {
        "gamma_values": [0.5, 1.0, 2.0],
        "eps_values": {"start": 0.0, "stop": 0.9, "num": args.num},
        "omega_high": args.omega_high,
    })
    raise SystemExit(code)


if __name__ == "__main__":
    main()
