"""Referee, strategies and match runner for the (alpha, beta, c, rho)-game.

Bob plays nested closed balls whose radii shrink by at most a factor beta per
turn; Alice answers by erasing open sets under the budget
``sum diam^c <= (alpha * rho_m)^c`` (one set of diameter ``<= alpha * rho_m``
when ``c = 0``).  The infinite game is truncated once Bob's radius drops
below a stopping radius.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Protocol, Sequence

import mpmath
import numpy as np

from . import geometry as geo
from . import sets as S
from .errors import (BudgetExceeded, ExponentBudgetExceeded, IllegalMove, IllegalRadius,
                     MultipleSetsAtCZero, NotNested)
from .geometry import Ball, Box

_TIE = mpmath.mpf("1e-12")


@dataclass(frozen=True)
class GameParams:
    alpha: float
    beta: float
    c: float
    rho: float
    d: int = 1

    def __post_init__(self):
        if not self.alpha > 0 or not self.rho > 0:
            raise ValueError("alpha and rho must be positive")
        if not 0 < self.beta < 1:
            raise ValueError("beta must lie in (0, 1)")
        if self.c < 0:
            raise ValueError("c must be nonnegative")


@dataclass
class Turn:
    bob: Ball
    erased: Optional[list] = None
    budget_used: float = 0.0


@dataclass
class GameState:
    params: GameParams
    turns: list = field(default_factory=list)
    status: str = "in_progress"
    outcome: Optional[tuple] = None

    @property
    def phase(self) -> str:
        if self.turns and self.turns[-1].erased is None:
            return "alice"
        return "bob"

    @property
    def current_ball(self) -> Optional[Ball]:
        return self.turns[-1].bob if self.turns else None

    def erased_sets(self) -> list:
        return [a for t in self.turns if t.erased for a in t.erased]


# ---------------------------------------------------------------------------
# referee


def referee_bob(state: GameState, ball: Ball) -> GameState:
    if state.status != "in_progress":
        raise IllegalMove("game already finished")
    if state.phase != "bob":
        raise IllegalMove("it is Alice's turn")
    p = state.params
    if ball.dim != p.d:
        raise IllegalMove("ball dimension differs from the game")
    if not state.turns:
        if ball.radius < p.rho:
            raise IllegalRadius(f"first radius {ball.radius} is below rho={p.rho}")
    else:
        prev = state.turns[-1].bob
        if ball.radius < p.beta * prev.radius:
            raise IllegalRadius(f"radius {ball.radius} is below beta * {prev.radius}")
        room = prev.radius - ball.radius
        if room < 0 or geo.norm_sq(geo.sub(ball.center, prev.center)) > room * room:
            raise NotNested("ball is not inside the previous one")
    state.turns.append(Turn(ball))
    return state


def budget_used(shapes: Sequence, c: float):
    """``sum diam^c`` (c > 0) or the largest diameter (c = 0)."""
    if c == 0:
        return max((geo.diameter(a) for a in shapes), default=0.0)
    with mpmath.workdps(40):
        return float(mpmath.fsum(mpmath.sqrt(_mp(a.diameter_sq())) ** c for a in shapes))


def legal_budget(shapes: Sequence, alpha, c, rho) -> bool:
    """Exact for rational data when c = 0 (squared diameters compared)."""
    if not shapes:
        return True
    if c == 0:
        if len(shapes) > 1:
            return False
        bound = alpha * rho
        return shapes[0].diameter_sq() <= bound * bound
    with mpmath.workdps(40):
        total = mpmath.fsum(mpmath.sqrt(_mp(a.diameter_sq())) ** c for a in shapes)
        cap = (_mp(alpha) * _mp(rho)) ** c
        return bool(total <= cap or abs(total - cap) <= _TIE * cap)


def _mp(x):
    f = geo.to_fraction(x)
    return mpmath.mpf(f.numerator) / f.denominator


def referee_alice(state: GameState, erased: Sequence) -> GameState:
    if state.phase != "alice":
        raise IllegalMove("it is Bob's turn")
    p = state.params
    erased = list(erased)
    rho_m = state.turns[-1].bob.radius
    if p.c == 0 and len(erased) > 1:
        raise MultipleSetsAtCZero("with c = 0 Alice erases at most one set")
    if not legal_budget(erased, p.alpha, p.c, rho_m):
        raise BudgetExceeded("erased sets exceed the budget")
    state.turns[-1].erased = erased
    state.turns[-1].budget_used = budget_used(erased, p.c)
    return state


def replay(turns: Sequence[Turn], params: GameParams) -> GameState:
    """Re-referee a transcript under ``params``; raises on the first illegal move."""
    state = GameState(params)
    for t in turns:
        referee_bob(state, t.bob)
        referee_alice(state, t.erased or [])
    return state


# ---------------------------------------------------------------------------
# Alice


class AliceStrategy(Protocol):
    def move(self, state: GameState) -> list: ...


class Pass:
    def move(self, state: GameState) -> list:
        return []


@dataclass
class CenterEraser:
    """Erase the open ball of the largest legal diameter around Bob's centre.

    With ``c > 0`` the budget ``(alpha rho_m)^c`` is spent on a single set, so
    the erased ball has diameter ``alpha rho_m`` in every case.
    """

    fraction: float = 1.0

    def move(self, state: GameState) -> list:
        ball = state.current_ball
        p = state.params
        return [Ball(ball.center, p.alpha * ball.radius * self.fraction / 2, closed=False)]


def _sep_upper(base, level: int):
    """Upper bound on the separation of any gap of generation >= ``level``."""
    if isinstance(base, S.CentralCantor):
        a, b = base.interval
        return base.keep_ratio ** level * (b - a)
    if isinstance(base, S.Sponge):
        k = max(level - 2, 0)
        return geo.sqrt(sum(Fraction(1, n ** (2 * k)) for n in base.grid))
    return math.inf


def gaps_meeting_ball(spec: S.SetDescriptor, ball: Ball, min_sep: float = 0.0,
                      max_depth: int = 200) -> list:
    """Gaps meeting the closed ball, down to the generation where separations
    fall to ``min_sep`` (all generations needed to find anything larger)."""
    base, lam, _ = S.unwrap(spec)
    depth = 1
    if not isinstance(base, S.Explicit):
        while depth < max_depth and float(_sep_upper(base, depth + 1) * lam) > min_sep:
            depth += 1
        if base.depth is not None:
            depth = min(depth, base.depth)
    r = ball.radius
    region = Box(tuple(x - r for x in ball.center), tuple(x + r for x in ball.center))
    enum = S.enumerate_gaps(spec, depth, region=region)
    return [g for g in enum.gaps if geo.meets_ball(g.shape, ball)]


def _meets_exterior(spec: S.SetDescriptor, ball: Ball) -> bool:
    h = S.hull(spec)
    return not geo.closure_within_closed(ball, h)


@dataclass
class ThicknessStrategy:
    """Erase the first gap met by Bob's ball once the ball is smaller than its separation.

    ``alpha`` defaults to the game's alpha; a gap is erased only when the move
    is legal and it was not erased before.  ``log`` collects
    ``(turn, gap key, diam gap, diam ball, legal)`` for every trigger.
    """

    target: S.SetDescriptor
    alpha: Optional[float] = None
    log: list = field(default_factory=list)

    def trigger(self, state: GameState):
        ball = state.current_ball
        if _meets_exterior(self.target, ball):
            return None
        diam_b = 2 * ball.radius
        found = gaps_meeting_ball(self.target, ball, min_sep=float(diam_b))
        if not found:
            return None
        first = min(found, key=lambda g: g.key)
        if not diam_b < S.gap_separation(self.target, first):
            return None
        return first

    def move(self, state: GameState) -> list:
        gap = self.trigger(state)
        if gap is None:
            return []
        erased = state.erased_sets()
        if any(a == gap.shape for a in erased):
            return []
        p = state.params
        alpha = p.alpha if self.alpha is None else self.alpha
        legal = legal_budget([gap.shape], alpha, p.c, state.current_ball.radius)
        self.log.append((len(state.turns) - 1, gap.key, gap.diameter, 2 * float(state.current_ball.radius), legal))
        return [gap.shape] if legal else []


@dataclass
class UnionStrategy:
    """Play every component strategy at once; needs ``sum alpha_j^c <= alpha^c``."""

    components: list  # of (strategy, alpha_j)
    alpha: float
    c: float

    def __post_init__(self):
        if self.components and self.c <= 0:
            raise ExponentBudgetExceeded("combining strategies needs c > 0")
        total = sum(a ** self.c for _, a in self.components)
        if total > self.alpha ** self.c * (1 + 1e-12):
            raise ExponentBudgetExceeded(f"sum alpha_j^c = {total} exceeds alpha^c = {self.alpha ** self.c}")

    def move(self, state: GameState) -> list:
        out = []
        for strat, _ in self.components:
            out.extend(strat.move(state))
        return out


def union_strategy(components, alpha: float, c: float):
    if not components:
        return Pass()
    return UnionStrategy(list(components), alpha, c)


def _map_ball(ball: Ball, lam, off, inverse=False) -> Ball:
    if inverse:
        return Ball(tuple((x - o) / lam for x, o in zip(ball.center, off)), ball.radius / lam, ball.closed)
    return Ball(tuple(lam * x + o for x, o in zip(ball.center, off)), lam * ball.radius, ball.closed)


@dataclass
class ConjugateStrategy:
    """Base strategy transported through ``f(x) = lam * x + offset``."""

    base: object
    lam: float
    offset: tuple

    def move(self, state: GameState) -> list:
        p = state.params
        inner = GameState(GameParams(p.alpha, p.beta, p.c, p.rho / self.lam, p.d))
        for t in state.turns:
            inner.turns.append(Turn(_map_ball(t.bob, self.lam, self.offset, inverse=True),
                                    None if t.erased is None else
                                    [geo.transform(a, 1 / self.lam, tuple(-o / self.lam for o in self.offset))
                                     for a in t.erased]))
        return [geo.transform(a, self.lam, tuple(self.offset)) for a in self.base.move(inner)]


def conjugate_strategy(strategy, lam, offset):
    if not lam > 0:
        raise ValueError("lam must be positive")
    if lam == 1 and not any(offset):
        return strategy
    return ConjugateStrategy(strategy, lam, tuple(offset))


# ---------------------------------------------------------------------------
# Bob


class BobPolicy(Protocol):
    def next_ball(self, state: GameState) -> Ball: ...


_SAFETY = 1 - 1e-12


def _fits(center, new, room) -> bool:
    diff = geo.sub(tuple(geo.to_fraction(x) for x in new), tuple(geo.to_fraction(x) for x in center))
    r = geo.to_fraction(room)
    return r >= 0 and geo.norm_sq(diff) <= r * r


def _step_toward(center, target, room):
    """Move from ``center`` toward ``target`` by at most ``room``, checked exactly."""
    v = [float(t) - float(x) for x, t in zip(center, target)]
    n = math.sqrt(sum(x * x for x in v))
    step = float(room) * _SAFETY
    frac = 1.0 if n <= step else step / n
    for _ in range(60):
        new = tuple(float(x) + frac * y for x, y in zip(center, v))
        if _fits(center, new, room):
            return new
        frac *= 0.5
    return tuple(center)


@dataclass
class ConcentricShrink:
    center: tuple
    factor: Optional[float] = None

    def next_ball(self, state: GameState) -> Ball:
        p = state.params
        if not state.turns:
            return Ball(tuple(self.center), p.rho, closed=True)
        f = p.beta if self.factor is None else self.factor
        return Ball(tuple(self.center), state.current_ball.radius * f, closed=True)


@dataclass
class GapChaser:
    """Steers toward the largest unerased gap of ``target`` meeting its ball.

    Radii shrink by a random factor in ``[beta, min(1, 2 beta)]``.
    """

    target: S.SetDescriptor
    seed: int = 0
    start: Optional[tuple] = None
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)

    def next_ball(self, state: GameState) -> Ball:
        p = state.params
        if not state.turns:
            if self.start is not None:
                c = tuple(self.start)
            else:
                h = geo.bounding_box(S.hull(self.target))
                c = tuple(float(lo) + self.rng.random() * float(hi - lo) for lo, hi in zip(h.lower, h.upper))
            return Ball(c, p.rho, closed=True)
        ball = state.current_ball
        f = self.rng.uniform(p.beta, min(1.0, 2 * p.beta))
        radius = max(float(ball.radius) * f, float(p.beta * ball.radius) / _SAFETY)
        erased = state.erased_sets()
        cands = [g for g in gaps_meeting_ball(self.target, ball, min_sep=float(ball.radius) * float(p.beta))
                 if g.shape not in erased]
        if not cands:
            return Ball(ball.center, radius, closed=True)
        gap = min(cands, key=lambda g: g.key)
        aim = geo.bounding_box(gap.shape).center
        return Ball(_step_toward(ball.center, aim, ball.radius - radius), radius, closed=True)


@dataclass
class RandomLegal:
    seed: int = 0
    start: Optional[tuple] = None
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        self.rng = np.random.default_rng(self.seed)

    def next_ball(self, state: GameState) -> Ball:
        p = state.params
        if not state.turns:
            c = tuple(self.start) if self.start is not None else tuple(self.rng.random(p.d))
            return Ball(tuple(float(x) for x in c), p.rho, closed=True)
        ball = state.current_ball
        radius = max(float(ball.radius) * self.rng.uniform(p.beta, 1.0), float(p.beta * ball.radius) / _SAFETY)
        room = (float(ball.radius) - radius) * _SAFETY
        v = self.rng.normal(size=p.d)
        v = v / max(np.linalg.norm(v), 1e-300) * room * self.rng.random()
        aim = tuple(float(x) + float(y) for x, y in zip(ball.center, v))
        return Ball(_step_toward(ball.center, aim, ball.radius - radius), radius, closed=True)


# ---------------------------------------------------------------------------
# matches


@dataclass
class MatchVerdict:
    tag: str  # "erased", "in_S" or "not_in_S"
    outcome: tuple
    rho_final: float
    dist_to_S: float


def distance_to_winning_set(spec: S.SetDescriptor, x, max_depth: int = 200) -> float:
    """Distance from ``x`` to ``C`` union its unbounded component."""
    kind, gap = S.locate(spec, x, max_depth)
    if kind != "gap":
        return 0.0
    p = tuple(geo.to_fraction(v) for v in x)
    return geo.distance_to_complement(Box(p, p), gap.shape)


def play_match(alice, bob, params: GameParams, stop_radius: float,
               target: Optional[S.SetDescriptor] = None, max_turns: int = 10_000):
    """Run until Bob's radius is below ``stop_radius``; classify the final centre."""
    if not stop_radius > 0:
        raise ValueError("stop_radius must be positive")
    state = GameState(params)
    for _ in range(max_turns):
        referee_bob(state, bob.next_ball(state))
        referee_alice(state, alice.move(state))
        if state.current_ball.radius < stop_radius:
            break
    ball = state.current_ball
    state.status = "finished"
    state.outcome = tuple(ball.center)
    rho = float(ball.radius)
    if any(geo.contains_point(a, state.outcome) for a in state.erased_sets()):
        return state, MatchVerdict("erased", state.outcome, rho, math.nan)
    if target is None:
        return state, MatchVerdict("not_in_S", state.outcome, rho, math.nan)
    dist = distance_to_winning_set(target, state.outcome)
    tag = "in_S" if dist <= rho else "not_in_S"
    return state, MatchVerdict(tag, state.outcome, rho, dist)


def _num(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return float(x) if not isinstance(x, int) else x


def write_trace(state: GameState, path) -> None:
    """One JSON object per turn: Bob's ball, Alice's erased sets, budget used."""
    with open(path, "w", encoding="utf-8") as fh:
        for m, t in enumerate(state.turns):
            row = {"m": m,
                   "bob": {"center": [_num(x) for x in t.bob.center], "radius": _num(t.bob.radius)},
                   "alice": [S.shape_to_dict(a) for a in (t.erased or [])],
                   "budget": t.budget_used}
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def read_trace(path) -> list:
    turns = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            row = json.loads(line)
            bob = Ball(tuple(S._num(x) for x in row["bob"]["center"]), S._num(row["bob"]["radius"]), closed=True)
            turns.append(Turn(bob, [S.shape_from_dict(a) for a in row["alice"]], row["budget"]))
    return turns
