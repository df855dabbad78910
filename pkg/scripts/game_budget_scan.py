"""Thickness strategy on the middle-fifths set at the stated alpha and at twice it.

Counts match outcomes and strategy triggers that would overspend the budget.

    python scripts/game_budget_scan.py --matches 200
"""
import argparse
import collections
import time
from fractions import Fraction

from thickset.game import GameParams, GapChaser, ThicknessStrategy, play_match
from thickset.sets import CentralCantor


def run(multiplier, matches, stop):
    target = CentralCantor(keep_ratio=Fraction(2, 5))
    tau, beta = 2, Fraction(1, 4)
    params = GameParams(alpha=multiplier / (tau * beta), beta=beta, c=0, rho=beta / 2)
    tags, illegal = collections.Counter(), 0
    start = time.perf_counter()
    for seed in range(matches):
        alice = ThicknessStrategy(target)
        _, verdict = play_match(alice, GapChaser(target, seed), params, stop, target=target)
        tags[verdict.tag] += 1
        illegal += sum(1 for entry in alice.log if not entry[4])
    return tags, illegal, time.perf_counter() - start


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--matches", type=int, default=200)
    ap.add_argument("--stop", type=float, default=1e-8)
    args = ap.parse_args()
    print("alpha_factor,matches,erased,in_S,not_in_S,over_budget_triggers,seconds")
    for mult in (1, 2):
        tags, illegal, secs = run(mult, args.matches, args.stop)
        print(f"{mult},{args.matches},{tags['erased']},{tags['in_S']},{tags['not_in_S']},{illegal},{secs:.1f}")


if __name__ == "__main__":
    main()
