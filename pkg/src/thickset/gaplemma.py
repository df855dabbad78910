"""Linked gaps, the intersection decision rule and an intersection locator.

Open sets handled here are bounded gaps (Box or Ball) and the exterior of a
closed convex hull, wrapped as :class:`Exterior`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from . import geometry as geo
from . import sets as S
from .errors import DimensionMismatch, IterationBudgetExceeded, NotLinkedSets, UnsupportedShapePair
from .geometry import Ball, Box, CellUnion
from .thickness import ThicknessReport, thickness


@dataclass(frozen=True)
class Exterior:
    """Complement of a closed Box or Ball."""

    hull: Union[Box, Ball]

    @property
    def dim(self) -> int:
        return self.hull.dim


OpenSet = Union[Box, Ball, Exterior]


@dataclass
class LinkVerdict:
    tag: str  # "disjoint", "linked" or "not_linked"
    witnesses: tuple = ()
    detail: str = ""


@dataclass
class GapLemmaVerdict:
    tag: str  # "intersect_guaranteed", "hypothesis_fails" or "trivially_intersect"
    tau_product: float
    which: Optional[str] = None
    detail: str = ""
    tau_lower_product: float = 0.0
    reports: tuple = ()


# ---------------------------------------------------------------------------
# membership helpers for open sets


def _in_open(shape: OpenSet, p) -> bool:
    if isinstance(shape, Exterior):
        return not geo.contains_point(shape.hull, p, closed=True)
    return geo.contains_point(shape, p)


def _distance_to_open(shape: OpenSet, p) -> float:
    """Distance from ``p`` to the open set (0 inside its closure)."""
    if isinstance(shape, Exterior):
        if not geo.contains_point(shape.hull, p, closed=True):
            return 0.0
        return geo.distance_to_complement(Box(tuple(p), tuple(p)), shape.hull)
    return geo.point_distance_to(shape, p)


def _core(shape: OpenSet):
    """The bounded convex set whose boundary is the boundary of ``shape``."""
    return shape.hull if isinstance(shape, Exterior) else shape


def _clip(p, box: Box):
    return tuple(min(max(x, lo), hi) for x, lo, hi in zip(p, box.lower, box.upper))


def _nearest_in_ball(p, ball: Ball):
    v = geo.sub(p, ball.center)
    n2 = geo.norm_sq(v)
    if n2 <= ball.radius * ball.radius:
        return tuple(p)
    n = math.sqrt(float(n2))
    return tuple(float(c) + float(ball.radius) * float(x) / n for c, x in zip(ball.center, v))


def _common_point(a, b):
    """Some point of ``closure(a) & b`` for closed convex sets meeting each other."""
    if isinstance(a, Box) and isinstance(b, Box):
        lo = tuple(max(x, y) for x, y in zip(a.lower, b.lower))
        hi = tuple(min(x, y) for x, y in zip(a.upper, b.upper))
        return tuple((x + y) / 2 for x, y in zip(lo, hi))
    if isinstance(a, Ball) and isinstance(b, Box):
        return _clip(a.center, b)
    if isinstance(a, Box) and isinstance(b, Ball):
        return _clip(b.center, a)
    return _nearest_in_ball(a.center, b)


def _check_shapes(*shapes):
    for s in shapes:
        if isinstance(s, CellUnion) or (isinstance(s, Exterior) and isinstance(s.hull, CellUnion)):
            raise UnsupportedShapePair("cell unions have no exact linkedness test")
        if not isinstance(s, (Box, Ball, Exterior)):
            raise UnsupportedShapePair(f"unsupported open set {type(s).__name__}")
    if len({s.dim for s in shapes}) > 1:
        raise DimensionMismatch("open sets live in different dimensions")


def _boundary_escapes(u: OpenSet, v: OpenSet) -> bool:
    """Is the boundary of ``u`` not contained in ``v``?"""
    cu = _core(u)
    if isinstance(v, Exterior):
        # boundary of u meets the closed hull of v
        return not geo.closures_disjoint(cu, v.hull) and not geo.closure_within_open(v.hull, cu)
    return not geo.closure_within_open(cu, v)


def _boundary_witness(u: OpenSet, v: OpenSet):
    """A point of boundary(u) outside v, as far from v as the candidates allow."""
    cu = _core(u)
    away = _core(v).center if isinstance(_core(v), Ball) else None
    cands = list(geo.boundary_candidates(cu, away_from=away))
    if isinstance(v, Exterior):
        h = v.hull
        try:
            inside = _common_point(cu, h)
            for q in geo.boundary_candidates(h, away_from=None):
                if not geo.contains_point(cu, q):
                    cands.append(geo.segment_exit(cu, inside, q))
        except (TypeError, ZeroDivisionError):
            pass
    good = [p for p in cands if not _in_open(v, p)]
    return _pick(good, v) if good else None


def _pick(points, v):
    """Candidate maximising its distance to ``v``; ties keep the first."""
    if isinstance(v, Exterior):
        score = [geo.distance_to_complement(Box(tuple(p), tuple(p)), v.hull) for p in points]
    else:
        score = [geo.point_distance_to(v, p) for p in points]
    best = max(range(len(points)), key=lambda i: (score[i], -i))
    return points[best]


def _intersect(u: OpenSet, v: OpenSet) -> bool:
    if isinstance(u, Exterior) and isinstance(v, Exterior):
        return True
    if isinstance(v, Exterior):
        u, v = v, u
    if isinstance(u, Exterior):
        return not geo.closure_within_closed(v, u.hull)
    return geo.intersects_open(u, v)


def linked(u: OpenSet, v: OpenSet) -> LinkVerdict:
    """Decide whether two open sets are linked gaps.

    Linked means they meet and each boundary has a point outside the other.
    """
    _check_shapes(u, v)
    if not _intersect(u, v):
        return LinkVerdict("disjoint")
    if not _boundary_escapes(u, v):
        return LinkVerdict("not_linked", detail="boundary of the first set lies inside the second")
    if not _boundary_escapes(v, u):
        return LinkVerdict("not_linked", detail="boundary of the second set lies inside the first")
    return LinkVerdict("linked", (_boundary_witness(u, v), _boundary_witness(v, u)))


# ---------------------------------------------------------------------------
# containment of one set in a gap of another


def _inside_some_gap(shape, spec: S.SetDescriptor, max_depth: int = 64) -> bool:
    """Is the closed convex ``shape`` contained in one bounded gap of ``spec``?"""
    diam = geo.diameter(shape)
    if diam == 0:
        point = shape.lower if isinstance(shape, Box) else shape.center
        kind, _ = S.locate(spec, point, max_depth)
        return kind == "gap"
    region = geo.bounding_box(shape)
    depth = 1
    while True:
        enum = S.enumerate_gaps(spec, depth, region=region)
        for g in enum.gaps:
            if geo.diameter(g.shape) > diam and geo.closure_within_open(shape, g.shape):
                return True
        if enum.tail_bound <= diam or enum.complete or depth >= max_depth:
            return False
        base, _, _ = S.unwrap(spec)
        if isinstance(base, S.Explicit):
            return False
        depth += 1


def containment_in_gap(ca: S.SetDescriptor, cb: S.SetDescriptor) -> bool:
    """True iff ``ca`` lies inside one gap of ``cb`` or in its unbounded component.

    The hull of every supported descriptor is the convex hull of the set, so
    a convex gap contains the set exactly when it contains the hull.  For the
    unbounded component, ``ca`` avoids the hull of ``cb`` exactly when that
    hull sits in the unbounded component of ``ca`` or in one of its gaps.
    """
    ha, hb = S.hull(ca), S.hull(cb)
    if _inside_some_gap(ha, cb):
        return True
    if geo.closures_disjoint(ha, hb):
        return True
    return _inside_some_gap(hb, ca)


# ---------------------------------------------------------------------------
# decision rule


def certified_thickness(spec: S.SetDescriptor, depth: int = 6) -> ThicknessReport:
    base, _, _ = S.unwrap(spec)
    if isinstance(base, S.Sponge):
        depth = min(depth, 3)
    return thickness(spec, depth)


def gap_lemma_decide(c1: S.SetDescriptor, c2: S.SetDescriptor, depth: int = 6,
                     find_contact: bool = False) -> GapLemmaVerdict:
    """Apply the intersection criterion: no containment in a gap plus a thickness product above 1.

    The verdict never claims disjointness.  With ``find_contact`` a shared
    hull corner certified to lie in both sets is reported as a trivial
    intersection before the thickness test.
    """
    if c1.dim != c2.dim:
        raise UnsupportedShapePair("sets live in different dimensions")
    r1, r2 = certified_thickness(c1, depth), certified_thickness(c2, depth)
    prod = r1.value * r2.value if r1.value and r2.value else 0.0
    low = r1.lower * r2.lower if r1.lower and r2.lower else 0.0
    if containment_in_gap(c1, c2) or containment_in_gap(c2, c1):
        return GapLemmaVerdict("hypothesis_fails", prod, "containment-in-gap",
                               "one set lies in a gap of the other", low, (r1, r2))
    if find_contact:
        p = shared_hull_point(c1, c2)
        if p is not None:
            return GapLemmaVerdict("trivially_intersect", prod, None, f"shared point {p}", low, (r1, r2))
    if low > 1:
        return GapLemmaVerdict("intersect_guaranteed", prod, None,
                               "certified thickness product exceeds 1", low, (r1, r2))
    if prod <= 1:
        return GapLemmaVerdict("hypothesis_fails", prod, "thickness-product<=1",
                               "thickness product is at most 1", low, (r1, r2))
    return GapLemmaVerdict("hypothesis_fails", prod, "thickness-unknown",
                           "certified lower bounds do not clear 1", low, (r1, r2))


def shared_hull_point(c1: S.SetDescriptor, c2: S.SetDescriptor, max_depth: int = 64):
    """A hull corner of one set certified to belong to both, or None."""
    for a, b in ((c1, c2), (c2, c1)):
        for p in geo.boundary_candidates(S.hull(a)):
            if S.locate(a, p, max_depth)[0] == "set" and S.locate(b, p, max_depth)[0] == "set":
                return p
    return None


# ---------------------------------------------------------------------------
# locator following the linked-gap refinement


@dataclass
class RefineResult:
    point: tuple
    exact: bool
    """True when the point was certified to lie in both sets."""
    iterations: int
    bound: float
    """Upper bound on the distance from ``point`` to either set."""
    trace: list = field(default_factory=list)


def _gap_of(spec, point, max_depth):
    kind, gap = S.locate(spec, point, max_depth)
    if kind == "undecided":
        raise IterationBudgetExceeded("point location needs more generations")
    return kind, gap


def _require_linked(u, v, what):
    verdict = linked(u, v)
    if verdict.tag != "linked":
        raise NotLinkedSets(f"{what} are not linked ({verdict.detail or verdict.tag})")
    return verdict


def linked_refine(c1: S.SetDescriptor, c2: S.SetDescriptor, eps: float = 1e-6,
                  max_iter: int = 10_000, max_depth: int = 200) -> RefineResult:
    """Approximate a point of ``c1 & c2`` by following a chain of linked gap pairs.

    Starting from the unbounded components, each step replaces the gap of one
    set by the gap of that set containing a boundary witness of the other.
    The side whose separation exceeds the other's gap diameter advances.
    Stops at a witness certified in both sets, or once one gap of the pair has
    diameter below ``eps``.  Linkedness of every visited pair is verified.
    """
    r1, r2 = certified_thickness(c1), certified_thickness(c2)
    if not r1.lower * r2.lower > 1:
        raise NotLinkedSets("the locator needs a certified thickness product above 1")
    e1, e2 = Exterior(S.hull(c1)), Exterior(S.hull(c2))
    trace = []
    w = _require_linked(e1, e2, "unbounded components")
    x1 = w.witnesses[0]
    kind, v_gap = _gap_of(c2, x1, max_depth)
    if kind == "set":
        return RefineResult(tuple(x1), True, 0, 0.0, trace)
    if kind == "E":
        raise NotLinkedSets("witness fell in the unbounded component")
    w = _require_linked(e1, v_gap.shape, "E1 and a gap of C2")
    x2 = w.witnesses[1]
    kind, u_gap = _gap_of(c1, x2, max_depth)
    if kind == "set":
        return RefineResult(tuple(x2), True, 0, 0.0, trace)
    if kind == "E":
        raise NotLinkedSets("witness fell in the unbounded component")
    for it in range(1, max_iter + 1):
        w = _require_linked(u_gap.shape, v_gap.shape, "visited gaps")
        du, dv = geo.diameter(u_gap.shape), geo.diameter(v_gap.shape)
        trace.append((it, du, dv))
        if min(du, dv) < eps:
            if du <= dv:
                return RefineResult(tuple(w.witnesses[0]), False, it, du, trace)
            return RefineResult(tuple(w.witnesses[1]), False, it, dv, trace)
        sep_u, sep_v = S.gap_separation(c1, u_gap), S.gap_separation(c2, v_gap)
        if sep_u <= dv and sep_v <= du:
            raise NotLinkedSets("both separation inequalities hold; thickness product is not above 1")
        if sep_u > dv:
            b = w.witnesses[1]
            kind, nxt = _gap_of(c1, b, max_depth)
            if kind == "set":
                return RefineResult(tuple(b), True, it, 0.0, trace)
            if kind == "E":
                raise NotLinkedSets("witness fell in the unbounded component")
            u_gap = nxt
        else:
            a = w.witnesses[0]
            kind, nxt = _gap_of(c2, a, max_depth)
            if kind == "set":
                return RefineResult(tuple(a), True, it, 0.0, trace)
            if kind == "E":
                raise NotLinkedSets("witness fell in the unbounded component")
            v_gap = nxt
    raise IterationBudgetExceeded(f"no point located after {max_iter} steps")
