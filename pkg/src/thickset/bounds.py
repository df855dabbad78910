"""Closed-form constants and dimension bounds driven by thickness.

Natural logarithms are used throughout.  Feasibility tests are evaluated in
60-digit arithmetic (mpmath) so the sign of the slack is not a rounding
artefact; an exact tie within a relative 1e-12 counts as feasible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import mpmath

from .errors import DimensionMismatch, InvalidC, NoFeasibleC

TIE_RTOL = mpmath.mpf("1e-12")


@dataclass(frozen=True)
class Constants:
    d: int
    K1: float
    K2: float


@dataclass
class DimensionBound:
    theorem: str  # "intersection", "single_set", "winning_set", "dim1d", "convex_gap"
    value: float
    feasible: bool
    params: dict = field(default_factory=dict)
    slack: Optional[float] = None
    warning: str = ""


@dataclass
class PatternCapacity:
    N: int
    tau: float
    beta: float
    raw: float
    """The expression inside the floor (0 when tau <= 1)."""
    pre_asymptotic: bool
    inputs: dict = field(default_factory=dict)


def _mpf(x):
    return mpmath.mpf(x) if not isinstance(x, mpmath.mpf) else x


def _constants_mp(d: int):
    with mpmath.workdps(60):
        sd = mpmath.sqrt(d)
        denom = 1 - mpmath.mpf(2) ** (-d)
        k1 = 2 * d * (24 * sd) ** d * mpmath.log(16 * sd) / denom
        k2 = ((24 * sd) ** d * (1 + 2 * mpmath.mpf(4) ** d) / denom) ** 2
        return k1, k2


def constants(d: int) -> Constants:
    if d < 1:
        raise DimensionMismatch("dimension must be >= 1")
    k1, k2 = _constants_mp(d)
    return Constants(d, float(k1), float(k2))


# ---------------------------------------------------------------------------
# bounds from thickness


def _beta(diam_b, sup_diam, factor=1):
    return min(0.25, factor * diam_b / sup_diam)


def _feasibility(lhs, beta, c, d, k2):
    """Return (feasible, slack) for ``lhs <= beta^c (1 - beta^(d-c)) / K2``."""
    with mpmath.workdps(60):
        rhs = _mpf(beta) ** c * (1 - _mpf(beta) ** (d - c)) / k2
        slack = rhs - lhs
        if abs(slack) <= TIE_RTOL * abs(rhs):
            return True, 0.0
        return slack > 0, float(slack)


def intersection_bound(taus: Sequence[float], sup_diam: float, diam_b: float, d: int, c: float,
                       theorem: str = "intersection") -> DimensionBound:
    """Lower bound for the dimension of ``B`` intersected with all the sets.

    ``beta = min(1/4, diam_b / sup_diam)``; the bound is
    ``d - K1 (sum tau_i^-c)^(d/c) / (beta^d |log beta|)`` and it is backed
    by the theory only when the feasibility condition holds.
    """
    if not 0 < c < d:
        raise InvalidC(f"c must lie in (0, {d}), got {c}")
    taus = list(taus)
    if not taus or any(not t > 0 for t in taus):
        raise ValueError("thickness values must be positive")
    if not (sup_diam > 0 and diam_b > 0):
        raise ValueError("diameters must be positive")
    beta = _beta(diam_b, sup_diam)
    k1, k2 = _constants_mp(d)
    with mpmath.workdps(60):
        c_m = _mpf(c)
        total = mpmath.fsum(_mpf(t) ** (-c_m) for t in taus)
        feasible, slack = _feasibility(total, beta, c_m, d, k2)
        b = _mpf(beta)
        value = d - k1 * total ** (d / c_m) / (b ** d * abs(mpmath.log(b)))
    params = {"d": d, "c": c, "beta": beta, "taus": taus, "K1": float(k1), "K2": float(k2)}
    warn = "" if feasible else "feasibility condition fails; value is not a guaranteed bound"
    return DimensionBound(theorem, float(value), feasible, params, slack, warn)


def single_set_bound(tau: float, diam_b: float, diam_c: float, d: int, c: float) -> DimensionBound:
    return intersection_bound([tau], diam_c, diam_b, d, c, theorem="single_set")


def winning_set_bound(alpha: float, beta: float, c: float, d: int) -> DimensionBound:
    """Dimension bound ``d - K1 alpha^d / |log beta|`` for winning sets, beta <= 1/4."""
    if not 0 < c < d:
        raise InvalidC(f"c must lie in (0, {d}), got {c}")
    if not 0 < beta <= 0.25:
        raise ValueError("beta must lie in (0, 1/4]")
    k1, k2 = _constants_mp(d)
    with mpmath.workdps(60):
        a = _mpf(alpha)
        lhs = a ** _mpf(c)
        rhs = (1 - _mpf(beta) ** (d - _mpf(c))) / k2
        slack = rhs - lhs
        tie = abs(slack) <= TIE_RTOL * rhs
        feasible = bool(slack >= 0 or tie)
        value = d - k1 * a ** d / abs(mpmath.log(_mpf(beta)))
    return DimensionBound("winning_set", float(value), feasible,
                          {"d": d, "c": c, "beta": beta, "alpha": alpha}, 0.0 if tie else float(slack),
                          "" if feasible else "feasibility condition fails")


def feasibility_threshold_tau(d: int, c: float, beta: float, count: int = 1) -> float:
    """Smallest common thickness making ``count`` sets feasible at (c, beta)."""
    _, k2 = _constants_mp(d)
    with mpmath.workdps(60):
        rhs = _mpf(beta) ** c * (1 - _mpf(beta) ** (d - _mpf(c))) / k2
        return float((rhs / count) ** (-1 / _mpf(c)))


def optimize_c(taus: Sequence[float], sup_diam: float, diam_b: float, d: int,
               grid: int = 400, tol: float = 1e-9) -> DimensionBound:
    """Best feasible bound over ``c`` in (0, d).

    A uniform scan locates the feasible values, golden-section search refines
    the best one, and for a single set the choice ``c = d - 1/log(tau beta)``
    is evaluated too.  Raises :class:`NoFeasibleC` when no scanned or
    refined value is feasible.
    """
    taus = list(taus)
    beta = _beta(diam_b, sup_diam)

    def score(c):
        b = intersection_bound(taus, sup_diam, diam_b, d, c)
        return (b.value if b.feasible else -math.inf), b

    cs = [d * (i + 0.5) / grid for i in range(grid)]
    scored = [(score(c)[0], c) for c in cs]
    best_val, best_c = max(scored, key=lambda t: (t[0], t[1]))
    candidates = []
    if len(taus) == 1 and taus[0] * beta > math.e ** (1 / d):
        c_proof = d - 1 / math.log(taus[0] * beta)
        candidates.append(c_proof)
    if best_val > -math.inf:
        # bracket around the best grid point; infeasible points score -inf
        step = d / grid
        lo, hi = max(best_c - step, tol), min(best_c + step, d - tol)
        g = (math.sqrt(5) - 1) / 2
        a, b = lo, hi
        x1, x2 = b - g * (b - a), a + g * (b - a)
        f1, f2 = score(x1)[0], score(x2)[0]
        while b - a > tol:
            if f1 >= f2:
                b, x2, f2 = x2, x1, f1
                x1 = b - g * (b - a)
                f1 = score(x1)[0]
            else:
                a, x1, f1 = x1, x2, f2
                x2 = a + g * (b - a)
                f2 = score(x2)[0]
        candidates.extend([best_c, x1, x2, a, b])
    results = [score(c)[1] for c in candidates]
    feasible = [r for r in results if r.feasible]
    if not feasible:
        raise NoFeasibleC("no c in (0, d) satisfies the feasibility condition")
    top = max(feasible, key=lambda r: (r.value, r.params["c"]))
    if len(taus) == 1 and candidates and taus[0] * beta > math.e ** (1 / d):
        top.params["proof_choice_c"] = candidates[0]
        top.params["proof_choice_value"] = results[0].value if results[0].feasible else None
    top.theorem = "intersection_optimized"
    return top


def pattern_capacity(tau: float, diam_b: float, diam_c: float, d: int) -> PatternCapacity:
    """Number of pattern points guaranteed for a set of thickness ``tau``.

    ``beta = min(1/4, 15 diam_b / (16 diam_c))``.  No guarantee (N = 0) when
    ``tau <= 1``; for ``1 < tau < e`` the formula is evaluated but flagged.
    """
    if not tau > 0 or not diam_b > 0 or not diam_c > 0:
        raise ValueError("tau and diameters must be positive")
    beta = min(0.25, 15 * diam_b / (16 * diam_c))
    inputs = {"diam_B": diam_b, "diam_C": diam_c, "d": d}
    if tau <= 1:
        return PatternCapacity(0, tau, beta, 0.0, False, inputs)
    _, k2 = _constants_mp(d)
    with mpmath.workdps(40):
        b = _mpf(beta)
        raw = b ** d * abs(mpmath.log(b)) / (mpmath.e * k2) * _mpf(tau) ** d / mpmath.log(_mpf(tau))
        n = int(mpmath.floor(raw))
    return PatternCapacity(n, tau, beta, float(raw), tau < math.e, inputs)


def smallest_tau_for_capacity(k: int, diam_b: float, diam_c: float, d: int) -> float:
    """Least ``tau >= e`` with ``N(tau) >= k``, by bisection on the increasing branch."""
    lo, hi = math.e, math.e * 2
    while pattern_capacity(hi, diam_b, diam_c, d).N < k:
        lo, hi = hi, hi * 2
    for _ in range(200):
        mid = (lo + hi) / 2
        if pattern_capacity(mid, diam_b, diam_c, d).N >= k:
            hi = mid
        else:
            lo = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi


def dim_lower_1d(tau: float) -> float:
    """``log 2 / log(2 + 1/tau)``; the limit 1 for infinite thickness."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    if tau == math.inf:
        return 1.0
    return 1 / math.log2(2 + 1 / tau)


def convex_gap_dim_bound(tau: float, d: int) -> float:
    if d < 2:
        raise DimensionMismatch("the convex-gap bound is stated for d >= 2")
    return d - 1 + dim_lower_1d(tau)


def sweep(taus_grid, cs, d: int, sup_diam: float = 1.0, diam_b: float = 1.0):
    """Yield CSV-ready rows ``(d, c, tau, beta, value, feasible)``."""
    for tau in taus_grid:
        for c in cs:
            b = intersection_bound([tau], sup_diam, diam_b, d, c)
            yield (d, c, tau, b.params["beta"], b.value, b.feasible)
