"""Pattern capacity of the carpets C_n: floored counts, unfloored counts and the fitted exponent.

    python scripts/capacity_fit.py
"""
import math

import numpy as np

from thickset.bounds import pattern_capacity, smallest_tau_for_capacity


def main():
    ns = np.geomspace(1e3, 1e6, 13)
    print("n,tau,N,raw")
    raws = []
    for n in ns:
        cap = pattern_capacity((n - 1) / (2 * math.sqrt(2)), 1, 1, 2)
        raws.append(cap.raw)
        print(f"{n:.0f},{cap.tau:.6g},{cap.N},{cap.raw:.6g}")
    slope = np.polyfit(np.log(raws), np.log(ns), 1)[0]
    print(f"# exponent of n against the unfloored count: {slope:.4f}")
    for k in (1, 2, 3, 10, 100):
        tau = smallest_tau_for_capacity(k, 1, 1, 2)
        n = 1 + 2 * math.sqrt(2) * tau
        print(f"# N >= {k} first at tau = {tau:.6g}, carpet n >= {math.ceil(n)}")


if __name__ == "__main__":
    main()
