"""Eigenvalue count and winding prediction against the flux for the three two-channel families.

Usage: python3 scripts/sweep_theta.py [--grid 60] [--jobs 0] [--outdir .]
"""
import argparse
import sys
from pathlib import Path

from scatterkit.cli import main as cli_main

FAMILIES = {"b0": "-1,0", "a_eq_b": "1,-1", "resonant": "-1,-0.5"}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=60)
    ap.add_argument("--jobs", type=int, default=0)
    ap.add_argument("--outdir", default=".")
    args = ap.parse_args(argv)
    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    for name, v in FAMILIES.items():
        out = outdir / f"sweep_theta_{name}.csv"
        code = cli_main(
            ["sweep-theta", f"--v={v}", "--grid", str(args.grid), "--jobs", str(args.jobs), "--out", str(out)]
        )
        if code:
            return code
        print(f"{name}: written to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
