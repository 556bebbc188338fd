"""Stationary branches alpha(Omega): gamma = 1 with several eps_dd, and a gamma sweep.

Writes one tf-branches run per curve under OUT/fig1/ and a combined long CSV
OUT/fig1/branches_long.csv (gamma, eps_dd, branch, Omega, alpha).
"""

import argparse
import csv
from pathlib import Path

from _common import run_task


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--num", type=int, default=121, help="Omega samples on [0, 6]")
    args = ap.parse_args()
    base = args.out / "fig1"
    curves = [(1.0, e) for e in (0.0, 0.2, 0.4, 0.6, 0.8)] + [(g, 0.4) for g in (0.5, 2.0)]
    status = 0
    rows = []
    for gamma, eps in curves:
        out = base / f"gamma{gamma:g}_eps{eps:g}"
        code = run_task("tf-branches", out, {
            "params": {"gamma": gamma, "eps_dd": eps},
            "omega_values": {"start": 0.0, "stop": 6.0, "num": args.num},
        })
        status = max(status, code)
        for path in sorted(out.glob("branch_*.csv")):
            branch = path.stem[len("branch_"):]
            with path.open() as fh:
                for r in csv.DictReader(fh):
                    if r["alpha"]:
                        rows.append((gamma, eps, branch, r["Omega"], r["alpha"]))
    with (base / "branches_long.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("gamma", "eps_dd", "branch", "Omega", "alpha"))
        w.writerows(rows)
    raise SystemExit(status)


if __name__ == "__main__":
    main()
