"""Write the (v1, v2, theta0) surface of band-bottom resonances for two channels.

Usage: python3 scripts/resonance_surface.py [--grid 80] [--out resonance_surface.csv]
"""
import argparse
import sys

import numpy as np

from scatterkit.cli import dump_csv
from scatterkit.n2 import resonance_surface


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=80)
    ap.add_argument("--out", default="resonance_surface.csv")
    args = ap.parse_args(argv)
    v1 = -np.geomspace(0.05, 50.0, args.grid)[::-1]
    v2 = -np.geomspace(0.02, 2.8, args.grid)[::-1]
    rows = resonance_surface(v1, v2)
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dump_csv(["v1", "v2", "theta0"], [list(r) for r in rows]))
    print(f"{len(rows)} resonant points of {args.grid**2} written to {args.out}")


if __name__ == "__main__":
    sys.exit(main())
