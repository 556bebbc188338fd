"""Largest growth rate over the (Omega, eps_dd) plane as CSV and a PGM of lambda0^(1/4)."""

import argparse
from pathlib import Path

from _common import run_task


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--preset", choices=("desk", "paper"), default="desk")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--n-max", type=int, default=13)
    args = ap.parse_args()
    code = run_task("stability-map", args.out / f"fig5_{args.preset}", {"n_max": args.n_max},
                    ["--preset", args.preset, "--threads", str(args.threads)])
    raise SystemExit(code)


if __name__ == "__main__":
    main()
