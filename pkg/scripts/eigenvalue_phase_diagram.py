"""Sign of the two-channel eigenvalue condition below the band on a (theta, depth) grid.

Interfaces between the signs trace the eigenvalue curves; the sign change
crossing depth 0 marks where a bound state leaves the band at the resonant flux.

Usage: python3 scripts/eigenvalue_phase_diagram.py [--v -1,-0.5] [--grid 200]
"""
import argparse
import sys

import numpy as np

from scatterkit.cli import dump_csv
from scatterkit.n2 import eigenvalue_phase_diagram


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--v", default="-1,-0.5")
    ap.add_argument("--grid", type=int, default=200)
    ap.add_argument("--max-depth", type=float, default=2.0)
    ap.add_argument("--out", default="eigenvalue_phase_diagram.csv")
    args = ap.parse_args(argv)
    v = tuple(float(x) for x in args.v.split(","))
    thetas = np.linspace(0.01, np.pi - 0.01, args.grid)
    depths = np.geomspace(1e-6, args.max_depth, args.grid)
    signs = eigenvalue_phase_diagram(v, thetas, depths)
    rows = [[t, d, int(signs[i, k])] for i, t in enumerate(thetas) for k, d in enumerate(depths)]
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(dump_csv(["theta", "depth", "sign"], rows))
    print(f"{len(rows)} grid points written to {args.out}")


if __name__ == "__main__":
    sys.exit(main())
