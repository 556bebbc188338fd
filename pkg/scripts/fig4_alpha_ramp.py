"""Simulated alpha(eps_dd) against the Thomas-Fermi branch along the ramp.

Uses the sim-ramp run of fig3_ramp_slices.py (running it if needed) and prints
the agreement summary stored in its manifest.
"""

import argparse
import json
from pathlib import Path

from fig3_ramp_slices import ensure_ramp


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("figures"))
    ap.add_argument("--n", type=int, default=64)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    out = args.out / "ramp"
    code = ensure_ramp(out, args.n, args.seed)
    man = json.loads((out / "manifest.json").read_text())
    diag = man["diagnostics"]
    print(f"comparison table: {out / 'comparison.csv'}")
    print("branch comparison:", json.dumps(diag.get("branch_comparison", {}), sort_keys=True))
    print("slice paraboloid residuals:",
          json.dumps(diag.get("slice_paraboloid_residual", {}), sort_keys=True))
    raise SystemExit(code)


if __name__ == "__main__":
    main()
