"""The eight acceptance criteria as plain functions.

Each returns a :class:`Result`; ``tests/test_acceptance.py`` asserts them and
``python tests/acceptance.py`` prints the summary on its own.
"""
from __future__ import annotations

import collections
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction as F

import numpy as np

from thickset.bounds import (constants, convex_gap_dim_bound, dim_lower_1d, feasibility_threshold_tau,
                             intersection_bound, pattern_capacity)
from thickset.errors import SurvivorShortfall
from thickset.game import GameParams, GapChaser, Pass, ThicknessStrategy, play_match
from thickset.gaplemma import gap_lemma_decide
from thickset.scaffold import (build_scaffold, check_projection, cover_bound, d_ball, desk_params, make_params,
                               scaffold_dimension, verify_tree)
from thickset.sets import CentralCantor, Sponge, Translate, sponge_cell_box
from thickset.thickness import sponge_thickness_closed_form, thickness
from thickset.verify import NonemptyWitness, box_counting, brute_intersection, in_sponge, pattern_search


@dataclass
class Result:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number} [{verdict}] {self.title}: {self.detail} ({self.seconds:.1f} s)"


def _timed(number, title, limit):
    def wrap(fn):
        def run() -> Result:
            start = time.perf_counter()
            ok, detail = fn()
            elapsed = time.perf_counter() - start
            if elapsed >= limit:
                ok, detail = False, f"{detail}; runtime {elapsed:.1f} s over the {limit} s limit"
            return Result(number, title, ok, detail, elapsed)
        run.number = number
        return run
    return wrap


@_timed(1, "carpet thickness", 1)
def criterion_1():
    worst = 0.0
    for n in (3, 5, 7):
        got = thickness(Sponge((n, n)), 2).value
        worst = max(worst, abs(got / ((n - 1) / (2 * math.sqrt(2))) - 1))
    return worst <= 1e-12, f"max relative error {worst:.1e} for n = 3, 5, 7"


@_timed(2, "mixed-sponge infimum", 5)
def criterion_2():
    closed = sponge_thickness_closed_form((3, 5))
    ok = closed.value == 0 and closed.truncation == "limit"
    ratios, prev = [], math.inf
    decreasing = True
    for k in range(3, 9):
        region = sponge_cell_box((3, 5), k - 2, (0, 0))
        v = thickness(Sponge((3, 5)), k, region=region).value
        decreasing &= v < prev
        prev = v
        ratios.append(v / (2 * 0.6 ** k))
    within = all(abs(r - 1) <= 0.05 for r in ratios)
    detail = (f"closed form {closed.value} ({closed.truncation}); ratios to 2(3/5)^k "
              f"{min(ratios):.4f}..{max(ratios):.4f}")
    return ok and within and decreasing, detail


@_timed(3, "gap lemma against the raster oracle", 60)
def criterion_3(pairs=200, seed=7):
    rng = random.Random(seed)
    tags = collections.Counter()
    contradictions = 0
    while sum(tags.values()) < pairs:
        r1 = F(rng.randint(3400, 4500), 10000)
        r2 = F(rng.randint(3400, 4500), 10000)
        off = F(rng.randint(-9000, 9000), 10000)
        c1, c2 = CentralCantor(keep_ratio=r1), Translate(CentralCantor(keep_ratio=r2), (off,))
        verdict = gap_lemma_decide(c1, c2)
        tags[verdict.tag] += 1
        if verdict.tag == "intersect_guaranteed":
            if not isinstance(brute_intersection([c1, c2], 12), NonemptyWitness):
                contradictions += 1
    detail = f"{tags['intersect_guaranteed']} guaranteed of {pairs}, {contradictions} contradictions"
    return contradictions == 0 and tags["intersect_guaranteed"] > 0, detail


@_timed(4, "thickness strategy soundness", 30)
def criterion_4(matches=1000):
    target = CentralCantor(keep_ratio=F(2, 5))
    tau, beta = 2, F(1, 4)
    params = GameParams(alpha=1 / (tau * beta), beta=beta, c=0, rho=beta * 1 / 2)
    stop = 1e-8
    tags = collections.Counter()
    bad_outcomes = proof_violations = illegal = 0
    for seed in range(matches):
        alice = ThicknessStrategy(target)
        _, verdict = play_match(alice, GapChaser(target, seed), params, stop, target=target)
        tags[verdict.tag] += 1
        if verdict.tag == "not_in_S" and not verdict.dist_to_S <= stop:
            bad_outcomes += 1
        for _, _, diam_g, diam_b, legal in alice.log:
            illegal += not legal
            if legal and not diam_g <= diam_b / (tau * float(beta)):
                proof_violations += 1
    detail = (f"erased {tags['erased']}, in_S {tags['in_S']}, outcomes away from S {bad_outcomes}; "
              f"{proof_violations} erased gaps break diam(G) <= diam(B)/(tau beta); "
              f"{illegal} triggers over the alpha*rho budget")
    return bad_outcomes == 0 and proof_violations == 0, detail


@_timed(5, "bounds positivity", 30)
def criterion_5(points=10_000, scaffold_points=200, seed=11):
    rng = np.random.default_rng(seed)
    nonpositive = 0
    for _ in range(points):
        d = int(rng.integers(1, 4))
        c = float(rng.uniform(0.02, 0.98)) * d
        beta = float(rng.uniform(0.01, 0.25))
        count = int(rng.integers(1, 4))
        tau = feasibility_threshold_tau(d, c, beta, count) * float(10 ** rng.uniform(0, 3))
        b = intersection_bound([tau] * count, 1, beta, d, c)
        if not b.feasible:
            raise AssertionError("sampled point should be feasible")
        nonpositive += not b.value > 0
    scaffold_fail = 0
    example = None
    k2 = constants(1).K2
    for _ in range(scaffold_points):
        c = float(rng.uniform(0.05, 0.95))
        beta = F(1, int(rng.integers(4, 33)))
        top = math.log10(((1 - float(beta) ** (1 - c)) / k2) ** (1 / c))
        alpha = float(10 ** rng.uniform(top - 6, top))
        p = make_params(1, alpha, beta, c)
        dim = scaffold_dimension(p)
        if not dim.holds:
            scaffold_fail += 1
            example = example or (alpha, c, dim.construction_deficit, dim.closed_form_deficit)
    detail = f"{nonpositive} non-positive bounds of {points}; scaffold inequality fails at {scaffold_fail}/{scaffold_points}"
    if example:
        detail += (f" (e.g. alpha={example[0]:.2e}, c={example[1]:.2f}: "
                   f"construction deficit {example[2]:.4e} > closed-form deficit {example[3]:.4e})")
    return nonpositive == 0 and scaffold_fail == 0, detail


@_timed(6, "lattice facts at desk scale", 60)
def criterion_6():
    p = desk_params(F(1, 864), F(1, 2), x0=(F(1, 5),))
    checked = sum(check_projection(d_ball(level, (w,)), p) for level in (0, 2, 4) for w in range(-6, 7))
    reports = {}
    shortfall = False
    for name, alice in (("pass", Pass()), ("thickness", ThicknessStrategy(CentralCantor()))):
        try:
            root = build_scaffold(p, alice, 3, keep=10)
        except SurvivorShortfall:
            shortfall = True
            continue
        reports[name] = verify_tree(root, p)
    ok = not shortfall and all(r.ok for r in reports.values()) and len(reports) == 2
    mins = ", ".join(f"{k}: {r.nodes} nodes, min children {r.min_children} >= {cover_bound(p)}"
                     for k, r in reports.items())
    return ok, f"{checked} projections checked; {mins}; shortfall {shortfall}"


@_timed(7, "dimension cross-checks", 30)
def criterion_7():
    est = box_counting(Sponge((3, 3)), range(1, 8)).slope
    true = math.log(8) / math.log(3)
    convex = convex_gap_dim_bound(1 / math.sqrt(2), 2)
    half = dim_lower_1d(0.5)
    one = dim_lower_1d(1)
    ok = (abs(est - true) <= 0.05 and abs(convex - (1 + math.log(2) / math.log(2 + math.sqrt(2)))) < 1e-12
          and convex <= est and half == 0.5 and abs(one - math.log(2) / math.log(3)) <= 1e-12)
    return ok, f"box counting {est:.6f} vs {true:.6f}; convex bound {convex:.6f}; dim1d(1/2) = {half}"


def _fit_exponent(ns, ks):
    return float(np.polyfit(np.log(ks), np.log(ns), 1)[0])


@_timed(8, "pattern machinery", 60)
def criterion_8():
    carpet = Sponge((3, 3))
    verified = {}
    for name, pattern in (("2-point", [(0, 0), (1, 0)]), ("3-point", [(0, 0), (1, 0), (2, 0)])):
        found = pattern_search(carpet, pattern, F(1, 9), 4)
        verified[name] = bool(found) and all(in_sponge(pt, (3, 3)) for w in found for pt in w.points)
    taus = np.geomspace(math.e, 1e6, 400)
    ns_grid = [pattern_capacity(t, 1, 1, 2).N for t in taus]
    monotone = all(b >= a for a, b in zip(ns_grid, ns_grid[1:]))
    ns = np.geomspace(1e3, 1e6, 40)
    caps = [pattern_capacity((n - 1) / (2 * math.sqrt(2)), 1, 1, 2) for n in ns]
    ks = np.array([c.N for c in caps], dtype=float)
    raw = np.array([c.raw for c in caps])
    raw_slope = _fit_exponent(ns, raw)
    positive = ks > 0
    if len(set(ks[positive])) >= 2:
        slope = _fit_exponent(ns[positive], ks[positive])
        fit = f"fitted exponent {slope:.4f}"
        fit_ok = 0.45 <= slope <= 0.55
    else:
        fit = f"N(tau(n)) = {int(ks.max())} for every n in [1e3, 1e6], no fit possible"
        fit_ok = False
    detail = (f"witnesses verified {verified}; N monotone {monotone}; {fit}; "
              f"exponent against the unfloored count {raw_slope:.4f}")
    return all(verified.values()) and monotone and fit_ok, detail


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8]


if __name__ == "__main__":
    for crit in CRITERIA:
        print(crit().line(), flush=True)
