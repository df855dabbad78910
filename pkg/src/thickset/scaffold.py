"""Lattice-ball Cantor construction behind the winning-set dimension bound.

Bob's balls are taken from the families

* ``E_n``: centres ``x0 + (rho_n / 2) z`` and radius ``rho_n = beta^n rho``;
* ``D_n``: centres ``x0 + 3 rho_n w`` (a subfamily of ``E_n`` with index ``6 w``).

Every ball is stored through its ``E_n`` index so lattice arithmetic stays
integral; centres and radii are exact fractions whenever ``beta``, ``rho`` and
``x0`` are rational.  A node at generation ``j`` lives on level ``jN``.  Its
children are the balls of ``D_{(j+1)N}`` inside the concentric half ball that
survive the potential filter ``phi <= (gamma rho_{(j+1)N})^c``, where ``phi``
adds up ``diam^c`` of every erased set met by the child among Alice's answers
to the child's ancestors.
"""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import mpmath

from . import geometry as geo
from .bounds import _constants_mp
from .errors import (InfeasibleParams, MissingHistory, NoContainingBall, ScaffoldBudgetExceeded,
                     SurvivorShortfall)
from .game import GameParams, GameState, Turn, legal_budget
from .geometry import Ball

_TIE = mpmath.mpf("1e-12")


# ---------------------------------------------------------------------------
# gamma, N, M


def gamma_for_dimension(d: int):
    """Closed-form ``gamma`` balancing the survivor count against the cover bound.

    Exact (a Fraction) when ``sqrt(d)`` is rational, a float otherwise.
    """
    if d < 1:
        raise ValueError("d must be >= 1")
    r = math.isqrt(d)
    if r * r == d:
        inner = (1 - Fraction(1, 2 ** d)) / ((8 * r) ** d * (1 + 2 * 4 ** d))
        g = _exact_root(inner, d)
        if g is not None:
            return g / 3
    with mpmath.workdps(40):
        inner = (1 - mpmath.mpf(2) ** (-d)) / ((8 * mpmath.sqrt(d)) ** d * (1 + 2 * mpmath.mpf(4) ** d))
        return float(inner ** (mpmath.mpf(1) / d) / 3)


def _exact_root(x: Fraction, d: int) -> Optional[Fraction]:
    def iroot(n):
        k = round(n ** (1 / d))
        for cand in (k - 1, k, k + 1):
            if cand >= 0 and cand ** d == n:
                return cand
        return None

    p, q = iroot(x.numerator), iroot(x.denominator)
    return Fraction(p, q) if p is not None and q is not None else None


def _bracket(d: int, gamma):
    """``1/(2^d 4^d sqrt(d)^d) - 3^d gamma^d (1 + 2 * 4^d)``, exact when possible."""
    r = math.isqrt(d)
    if r * r == d and isinstance(gamma, Fraction):
        return Fraction(1, 8 ** d * r ** d) - 3 ** d * gamma ** d * (1 + 2 * 4 ** d)
    return 1 / (8 ** d * d ** (d / 2)) - 3 ** d * float(gamma) ** d * (1 + 2 * 4 ** d)


def internal_k2(gamma, d: int) -> float:
    """The constant ``max(gamma^-2d, 2 gamma^-d log gamma^-d)`` used inside the survivor count."""
    g = float(gamma)
    return max(g ** (-2 * d), 2 * g ** (-d) * math.log(g ** (-d)))


@dataclass(frozen=True)
class ScaffoldParams:
    d: int
    alpha: object
    beta: object
    c: object
    rho: object
    gamma: object
    N: int
    x0: tuple
    feasible: bool
    desk: bool = False

    @property
    def bracket(self):
        return _bracket(self.d, self.gamma)

    @property
    def log_M(self) -> float:
        """``log M`` without forming ``M`` (it can have billions of digits)."""
        with mpmath.workdps(50):
            x = mpmath.mpf(-self.N * self.d) * mpmath.log(_mpf(self.beta)) + mpmath.log(_mpf(self.bracket))
            if x < 600:
                return float(mpmath.log(mpmath.ceil(mpmath.e ** x)))
            return float(x)

    @property
    def M(self) -> int:
        b = self.bracket
        if isinstance(b, Fraction) and isinstance(self.beta, Fraction):
            val = Fraction(1) / self.beta ** (self.N * self.d) * b
            return math.ceil(val)
        if self.N * self.d * abs(math.log(float(self.beta))) > 700:
            raise OverflowError("M is too large to form; use log_M")
        return math.ceil(float(self.beta) ** (-self.N * self.d) * float(b))

    def radius(self, n: int):
        return self.beta ** n * self.rho

    def game_params(self) -> GameParams:
        return GameParams(self.alpha, self.beta, self.c, self.rho, self.d)


def _mpf(x):
    f = Fraction(x) if isinstance(x, (int, Fraction)) else None
    if f is not None:
        return mpmath.mpf(f.numerator) / f.denominator
    return mpmath.mpf(x)


def feasibility_margin(alpha, beta, c, d: int) -> float:
    """``(1 - beta^(d-c)) / K2 - alpha^c`` with the global ``K2``."""
    _, k2 = _constants_mp(d)
    with mpmath.workdps(60):
        return float((1 - _mpf(beta) ** (d - _mpf(c))) / k2 - _mpf(alpha) ** _mpf(c))


def _is_feasible(alpha, beta, c, d) -> bool:
    _, k2 = _constants_mp(d)
    with mpmath.workdps(60):
        rhs = (1 - _mpf(beta) ** (d - _mpf(c))) / k2
        lhs = _mpf(alpha) ** _mpf(c)
        return bool(lhs <= rhs or abs(lhs - rhs) <= _TIE * rhs)


def _check_ranges(d, alpha, beta, c, rho):
    if d < 1:
        raise ValueError("d must be >= 1")
    if not 0 < beta <= Fraction(1, 4):
        raise ValueError("beta must lie in (0, 1/4]")
    if not 0 < c < d:
        raise ValueError(f"c must lie in (0, {d})")
    if not alpha > 0 or not rho > 0:
        raise ValueError("alpha and rho must be positive")


def make_params(d: int, alpha, beta, c, rho=1, gamma=None, x0=None) -> ScaffoldParams:
    """Parameters with ``N = floor(gamma^d / alpha^d)``.

    Refuses (``InfeasibleParams``) unless ``alpha^c <= (1 - beta^(d-c)) / K2``.
    """
    _check_ranges(d, alpha, beta, c, rho)
    if not _is_feasible(alpha, beta, c, d):
        raise InfeasibleParams(
            f"alpha^c exceeds (1 - beta^(d-c))/K2 (margin {feasibility_margin(alpha, beta, c, d):.3e})")
    gamma = gamma_for_dimension(d) if gamma is None else gamma
    ratio = (Fraction(gamma) / Fraction(alpha)) ** d if _rational(gamma, alpha) else (float(gamma) / float(alpha)) ** d
    N = math.floor(ratio)
    x0 = tuple(Fraction(0) for _ in range(d)) if x0 is None else tuple(x0)
    return ScaffoldParams(d, alpha, beta, c, rho, gamma, N, x0, True)


def desk_params(alpha, c, N: int = 2, beta=Fraction(1, 4), rho=Fraction(1, 8), x0=(Fraction(1, 2),),
                gamma=None) -> ScaffoldParams:
    """Small explicit-``N`` construction for exhaustive checks in dimension 1.

    The feasibility condition forces ``N`` into the hundreds, far beyond any
    enumerable lattice, so this entry point takes ``N`` directly and records
    whether the global condition holds instead of enforcing it.
    """
    d = len(x0)
    _check_ranges(d, alpha, beta, c, rho)
    if N < 1:
        raise ValueError("N must be >= 1")
    gamma = gamma_for_dimension(d) if gamma is None else gamma
    p = ScaffoldParams(d, alpha, beta, c, rho, gamma, N, tuple(x0), _is_feasible(alpha, beta, c, d), desk=True)
    if p.M < 1:
        raise InfeasibleParams("the survivor bound is not positive for this gamma")
    return p


def _rational(*xs) -> bool:
    return all(isinstance(x, (int, Fraction)) for x in xs)


# ---------------------------------------------------------------------------
# lattice balls


@dataclass(frozen=True, order=True)
class LatticeBall:
    """A ball of ``E_n`` identified by its integer index ``z``."""

    level: int
    z: tuple

    @property
    def family(self) -> str:
        return "D" if all(v % 6 == 0 for v in self.z) else "E"

    @property
    def d_index(self) -> Optional[tuple]:
        return tuple(v // 6 for v in self.z) if self.family == "D" else None

    def ball(self, p: ScaffoldParams) -> Ball:
        r = p.radius(self.level)
        return Ball(tuple(x + r * v / 2 for x, v in zip(p.x0, self.z)), r, closed=True)


def d_ball(level: int, w) -> LatticeBall:
    return LatticeBall(level, tuple(6 * v for v in w))


def _box_range(center, radius):
    return [range(math.ceil(c - radius), math.floor(c + radius) + 1) for c in center]


def _dist_sq(a, b):
    return sum((x - y) ** 2 for x, y in zip(a, b))


def _contained(outer: LatticeBall, inner: LatticeBall, p: ScaffoldParams, shrink=1) -> bool:
    """Whether ``inner`` lies in ``outer`` scaled about its centre by ``shrink``."""
    k = inner.level - outer.level
    b = p.beta ** k
    # units of rho_outer / 2: centre offset vs shrink * 2 - 2 b
    room = 2 * shrink - 2 * b
    return room >= 0 and _dist_sq(outer.z, [b * v for v in inner.z]) <= room * room


def project_pi(ball: LatticeBall, p: ScaffoldParams) -> LatticeBall:
    """Ancestor on the previous level.

    On levels that are multiples of ``N`` a containing ``D`` ball wins;
    otherwise the containing ``E`` ball with the nearest centre, ties broken by
    the lexicographically smallest index.
    """
    n = ball.level - 1
    if n < 0:
        raise NoContainingBall("level 0 has no ancestor")
    b = p.beta
    room = 2 - 2 * b
    target = [b * v for v in ball.z]
    if n % p.N == 0:
        hits = []
        for w in itertools.product(*_box_range([t / 6 for t in target], room / 6)):
            cand = d_ball(n, w)
            if _dist_sq(cand.z, target) <= room * room:
                hits.append(cand)
        if hits:
            if len(hits) > 1:
                raise NoContainingBall("two D balls contain the same ball")
            return hits[0]
    best = None
    for z in itertools.product(*_box_range(target, room)):
        dist = _dist_sq(z, target)
        if dist <= room * room and (best is None or (dist, z) < best[:2]):
            best = (dist, z)
    if best is None:
        raise NoContainingBall(f"no ball of level {n} contains {ball}")
    return LatticeBall(n, best[1])


def chain(ball: LatticeBall, p: ScaffoldParams) -> list:
    """``[pi_0(B), ..., pi_{n-1}(B), B]``."""
    out = [ball]
    while out[-1].level > 0:
        out.append(project_pi(out[-1], p))
    return out[::-1]


def half_ball_children(parent: LatticeBall, p: ScaffoldParams, budget: int = 100_000) -> list:
    """``D`` balls of level ``parent.level + N`` inside the concentric half ball."""
    lvl = parent.level + p.N
    bN = p.beta ** p.N
    room = Fraction(1, 2) - bN if _rational(p.beta) else 0.5 - bN
    # |3 w_parent - 3 bN w| <= room, in units of rho_parent, with z_parent = 6 w_parent
    centre = [Fraction(v, 2) / (3 * bN) if _rational(p.beta) else v / 2 / (3 * bN) for v in parent.z]
    rad = room / (3 * bN)
    ranges = _box_range(centre, rad)
    total = math.prod(len(r) for r in ranges)
    if total > budget:
        raise ScaffoldBudgetExceeded(f"{total} lattice candidates exceed the budget {budget}")
    out = []
    for w in itertools.product(*ranges):
        child = d_ball(lvl, w)
        if _contained(parent, child, p, shrink=Fraction(1, 2)):
            out.append(child)
    return out


def cover_bound(p: ScaffoldParams) -> float:
    """Volume lower bound ``beta^(-Nd) / (2^d 4^d sqrt(d)^d)`` on the child count."""
    if _rational(p.beta) and math.isqrt(p.d) ** 2 == p.d:
        return Fraction(1) / (p.beta ** (p.N * p.d) * 8 ** p.d * math.isqrt(p.d) ** p.d)
    return float(p.beta) ** (-p.N * p.d) / (8 ** p.d * p.d ** (p.d / 2))


def survivor_bound(p: ScaffoldParams):
    """``beta^(-Nd)`` times the bracket; never exceeds the child count when Alice is legal."""
    b = p.bracket
    if isinstance(b, Fraction) and _rational(p.beta):
        return b / p.beta ** (p.N * p.d)
    return float(p.beta) ** (-p.N * p.d) * float(b)


# ---------------------------------------------------------------------------
# Alice's answers along the chain


class History:
    """Alice's answers to every chain prefix, generated by replaying her strategy.

    The chain of a ball is treated as Bob's moves, so the answer to a level-n
    ball depends on the whole prefix; results are memoised per prefix.
    """

    def __init__(self, p: ScaffoldParams, alice):
        self.p = p
        self.alice = alice
        self._answers: dict = {}
        self._gp = p.game_params()

    def answers(self, prefix: tuple) -> list:
        """Erased sets per level for a chain prefix (a tuple of LatticeBall)."""
        if prefix in self._answers:
            return self._answers[prefix]
        prev = list(self.answers(prefix[:-1])) if len(prefix) > 1 else []
        state = GameState(self._gp)
        for ball, erased in zip(prefix[:-1], prev):
            state.turns.append(Turn(ball.ball(self.p), erased))
        state.turns.append(Turn(prefix[-1].ball(self.p)))
        move = list(self.alice.move(state))
        rho_m = prefix[-1].ball(self.p).radius
        if not legal_budget(move, self.p.alpha, self.p.c, rho_m):
            raise InfeasibleParams(f"Alice's answer at level {len(prefix) - 1} breaks the budget")
        out = prev + [move]
        self._answers[prefix] = out
        return out

    def for_ball(self, ball: LatticeBall, upto: Optional[int] = None) -> list:
        ch = tuple(chain(ball, self.p))
        upto = ball.level if upto is None else upto
        if upto > ball.level:
            raise MissingHistory("answers beyond the ball's own level are not defined")
        return self.answers(ch[:upto]) if upto > 0 else []


def potential_phi(ball: LatticeBall, history) -> float:
    """Sum of ``diam^c`` over erased sets of strict ancestors that meet ``ball``.

    ``history`` is a :class:`History` or an explicit list of per-level erased
    collections (entry ``n`` answering the level-``n`` ancestor).
    """
    if isinstance(history, History):
        p = history.p
        levels = history.for_ball(ball)
    else:
        raise TypeError("history must be a History")
    return _phi(ball, levels, p)


def phi_from_levels(ball: LatticeBall, levels: list, p: ScaffoldParams) -> float:
    if len(levels) < ball.level:
        raise MissingHistory(f"need answers for {ball.level} levels, got {len(levels)}")
    return _phi(ball, levels, p)


def _phi(ball, levels, p):
    b = ball.ball(p)
    with mpmath.workdps(40):
        terms = [_mpf(a.diameter_sq()) ** (_mpf(p.c) / 2)
                 for n in range(ball.level) for a in levels[n] if geo.meets_ball(a, b)]
        return float(mpmath.fsum(terms))


def _survives(phi: float, ball: LatticeBall, p: ScaffoldParams) -> bool:
    with mpmath.workdps(40):
        cap = (_mpf(p.gamma) * _mpf(p.radius(ball.level))) ** _mpf(p.c)
        return bool(phi <= cap or abs(phi - cap) <= _TIE * cap)


# ---------------------------------------------------------------------------
# tree


@dataclass
class ScaffoldNode:
    ball: LatticeBall
    j: int
    phi: float = 0.0
    children: list = field(default_factory=list)
    candidates: list = field(default_factory=list)
    """``(ball, phi, survived)`` for every lattice child examined."""

    def walk(self):
        yield self
        for ch in self.children:
            yield from ch.walk()


def build_scaffold(p: ScaffoldParams, alice, depth: int, keep: Optional[int] = None,
                   budget: int = 100_000) -> ScaffoldNode:
    """Expand ``depth`` generations, keeping ``keep`` (default ``M``) survivors per node.

    Raises :class:`SurvivorShortfall` when a node has fewer than ``M`` survivors.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if not p.feasible and not p.desk:
        raise InfeasibleParams("parameters fail the feasibility condition")
    m = p.M
    keep = m if keep is None else keep
    history = History(p, alice)
    root = ScaffoldNode(LatticeBall(0, tuple(0 for _ in range(p.d))), 0, 0.0)
    frontier = [root]
    for j in range(depth):
        nxt = []
        for node in frontier:
            survivors = []
            for child in half_ball_children(node.ball, p, budget):
                phi = phi_from_levels(child, history.for_ball(child), p)
                ok = _survives(phi, child, p)
                node.candidates.append((child, phi, ok))
                if ok:
                    survivors.append(ScaffoldNode(child, j + 1, phi))
            if len(survivors) < m:
                raise SurvivorShortfall(f"{len(survivors)} survivors below M={m} at {node.ball}", node)
            node.children = survivors[:keep]
            nxt.extend(node.children)
        frontier = nxt
    root.history = history
    return root


def emit_jsonl(root: ScaffoldNode, path) -> int:
    """Write every examined lattice child as one JSON line; return the line count."""
    rows = 0
    with open(path, "w", encoding="utf-8") as fh:
        for node in root.walk():
            kept = {ch.ball for ch in node.children}
            for ball, phi, ok in node.candidates:
                fh.write(json.dumps({"level": ball.level, "index": list(ball.z), "family": ball.family,
                                     "parent": list(node.ball.z), "phi": phi, "survivor": ok,
                                     "kept": ball in kept}) + "\n")
                rows += 1
    return rows


# ---------------------------------------------------------------------------
# checks


def check_projection(parent: LatticeBall, p: ScaffoldParams) -> int:
    """Every ``E_n`` ball inside the half of a ``D`` ball projects back to it.

    Exhaustive over ``n = level+1 .. level+N``; returns the number of balls
    checked and raises ``AssertionError`` on a counterexample.
    """
    checked = 0
    for k in range(1, p.N + 1):
        b = p.beta ** k
        # |z_parent - b z| <= 1 - 2b in units of rho_parent/2
        room = 1 - 2 * b
        for z in itertools.product(*_box_range([v / b for v in parent.z], room / b)):
            ball = LatticeBall(parent.level + k, z)
            if not _contained(parent, ball, p, shrink=Fraction(1, 2)):
                continue
            anc = ball
            while anc.level > parent.level:
                anc = project_pi(anc, p)
            assert anc == parent, f"{ball} projects to {anc}, not {parent}"
            checked += 1
    return checked


@dataclass
class TreeReport:
    nodes: int
    min_children: int
    cover_bound: object
    survivor_bound: object
    count_ok: bool
    survivors_ok: bool
    disjoint_ok: bool
    contained_ok: bool
    coherent_ok: bool
    outcome_ok: bool

    @property
    def ok(self) -> bool:
        return all((self.count_ok, self.survivors_ok, self.disjoint_ok, self.contained_ok,
                    self.coherent_ok, self.outcome_ok))


def verify_tree(root: ScaffoldNode, p: ScaffoldParams) -> TreeReport:
    """Re-check the structural facts of a built tree with exact lattice arithmetic."""
    cov, surv = cover_bound(p), survivor_bound(p)
    nodes = list(root.walk())
    internal = [n for n in nodes if n.candidates]
    count_ok = all(len(n.candidates) >= cov for n in internal)
    survivors_ok = all(sum(ok for _, _, ok in n.candidates) >= surv for n in internal)
    disjoint_ok = contained_ok = True
    for n in internal:
        kids = [b for b, _, _ in n.candidates]
        for a, b in itertools.combinations(kids, 2):
            ra = p.radius(a.level)
            # centres 3 rho w apart; disjoint closed balls need distance > 2 rho
            if _dist_sq(a.z, b.z) * (ra / 2) ** 2 <= (2 * ra) ** 2:
                disjoint_ok = False
        contained_ok &= all(_contained(n.ball, k, p, shrink=Fraction(1, 2)) for k in kids)
    coherent_ok = all(chain(n.ball, p)[0] == root.ball for n in nodes)
    outcome_ok = True
    history = getattr(root, "history", None)
    for leaf in (n for n in nodes if not n.children and n is not root):
        b = leaf.ball.ball(p)
        point = b.center
        anc = chain(leaf.ball, p)
        outcome_ok &= all(geo.contains_point(a.ball(p), point, closed=True) for a in anc)
        if history is not None:
            levels = history.for_ball(leaf.ball)
            outcome_ok &= not any(geo.contains_point(a, point, closed=False)
                                  for lvl in levels for a in lvl)
    return TreeReport(len(nodes), min((len(n.candidates) for n in internal), default=0), cov, surv,
                      count_ok, survivors_ok, disjoint_ok, contained_ok, coherent_ok, outcome_ok)


@dataclass
class ClaimsReport:
    hypothesis_margin: float
    """``(1 - beta^(d-c)) / K2(gamma) - alpha^c`` with the construction's own K2."""
    margins: dict
    holds: dict
    k2_internal: float
    k2_global: float


def check_claims_i_ii_iii(p: ScaffoldParams) -> ClaimsReport:
    """Margins of ``N alpha^d <= gamma^d``, the geometric-series claim and ``beta^(N(d-c)) <= gamma^d``."""
    d = p.d
    with mpmath.workdps(60):
        a, b, c, g = (_mpf(x) for x in (p.alpha, p.beta, p.c, p.gamma))
        gd = g ** d
        m1 = gd - p.N * a ** d
        m2 = gd - a ** c * g ** (-c) / (1 - b ** (d - c))
        m3 = gd - b ** (p.N * (d - c))
        k2i = max(g ** (-2 * d), 2 * g ** (-d) * mpmath.log(g ** (-d)))
        hyp = (1 - b ** (d - c)) / k2i - a ** c
        _, k2g = _constants_mp(d)
    margins = {"i": float(m1), "ii": float(m2), "iii": float(m3)}
    return ClaimsReport(float(hyp), margins, {k: v >= 0 for k, v in margins.items()}, float(k2i), float(k2g))


@dataclass
class ScaffoldDimension:
    construction: float
    """``log M / (N |log beta|)``."""
    closed_form: float
    """``d - K1 alpha^d / |log beta|``."""
    holds: bool
    construction_deficit: float = 0.0
    """``d - construction``, computed without cancellation."""
    closed_form_deficit: float = 0.0
    """``K1 alpha^d / |log beta|``."""


def _deficit_mp(p: ScaffoldParams, lb):
    """``d - log M / (N lb)`` without forming ``log M``.

    ``M = ceil(beta^(-Nd) * bracket)``, so the deficit is
    ``-(log bracket + log(M / (beta^(-Nd) bracket))) / (N lb)``; the rounding
    term is below ``e^-600`` once ``N d lb >= 600`` and is then dropped.
    """
    log_br = mpmath.log(_mpf(p.bracket))
    x = p.N * p.d * lb + log_br
    rounding = mpmath.mpf(0)
    if x < 600:
        with mpmath.workdps(400):
            big = mpmath.e ** (p.N * p.d * lb + log_br)
            rounding = mpmath.log(mpmath.ceil(big) / big)
    return -(log_br + rounding) / (p.N * lb)


def scaffold_dimension(p: ScaffoldParams) -> ScaffoldDimension:
    """Both sides of the final dimension inequality; ``holds`` records whether it is met.

    The comparison is made on the deficits from ``d`` in 50-digit arithmetic,
    since both sides round to ``d`` in double precision once alpha is tiny.
    """
    if not p.feasible:
        raise InfeasibleParams("the dimension bound needs feasible parameters")
    k1, _ = _constants_mp(p.d)
    with mpmath.workdps(50):
        lb = -mpmath.log(_mpf(p.beta))
        first_def = _deficit_mp(p, lb)
        second_def = k1 * _mpf(p.alpha) ** p.d / lb
        holds = bool(first_def <= second_def)
        return ScaffoldDimension(float(p.d - first_def), float(p.d - second_def), holds,
                                 float(first_def), float(second_def))
