"""Tabulate the intersection bound over a thickness grid and a few exponents.

    python scripts/bounds_sweep.py --d 2 > sweep.csv
"""
import argparse
import csv
import sys

import numpy as np

from thickset.bounds import feasibility_threshold_tau, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=1)
    ap.add_argument("--points", type=int, default=25)
    args = ap.parse_args()
    d = args.d
    cs = [d * f for f in (0.25, 0.5, 0.75, 0.9)]
    lo = min(feasibility_threshold_tau(d, c, 0.25) for c in cs)
    taus = np.geomspace(lo / 100, lo * 1e6, args.points)
    out = csv.writer(sys.stdout)
    out.writerow(["d", "c", "tau", "beta", "value", "feasible"])
    for row in sweep(taus, cs, d):
        out.writerow([row[0], f"{row[1]:.4g}", f"{row[2]:.6g}", row[3], f"{row[4]:.10g}", row[5]])


if __name__ == "__main__":
    main()
