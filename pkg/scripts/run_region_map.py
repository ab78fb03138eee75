"""Region map over (1/p, delta_tilde) with generated examples in every nontrivial cell.

Usage: python scripts/run_region_map.py [--panel beta>delta] [--out results/region_map.csv]
"""

import argparse
from collections import Counter
from pathlib import Path

import numpy as np

from mlfrac.cli import csv_text
from mlfrac.experiments import PANELS, region_map


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--panel", default="beta>delta", choices=sorted(PANELS))
    ap.add_argument("--steps", type=int, default=9)
    ap.add_argument("--out", default="results/region_map.csv")
    args = ap.parse_args()
    inv_p = list(np.linspace(0.1, 0.9, args.steps))
    dts = list(np.linspace(-0.2, 0.8, args.steps + 2))
    grid = region_map(PANELS[args.panel], inv_p, dts)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(csv_text(grid.rows(), grid.columns))
    counts = Counter((c.analytic, c.empirical) for c in grid.cells)
    for (analytic, empirical), k in sorted(counts.items()):
        print(f"{analytic:18s} {empirical:14s} {k}")


if __name__ == "__main__":
    main()
