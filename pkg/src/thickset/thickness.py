"""Thickness of gap-represented compact sets.

``thickness_1d`` uses the interval definition (shorter bridge over gap
length).  ``thickness_rd`` uses the d-dimensional ratio: distance from a gap to
all earlier gaps and to the unbounded component, over the gap's diameter.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from . import geometry as geo
from . import sets as S
from .errors import (DimensionMismatch, EmptyHull, InvalidGrid, LineMissesSet,
                     NonConvexGap, OutOfRange)
from .geometry import Ball, Box, CellUnion

INF = math.inf


@dataclass
class ThicknessReport:
    """Result of a thickness computation.

    ``truncation`` is one of ``"exact"``, ``"truncated"`` (finite prefix of an
    infinite gap list), ``"localized"`` (only gaps near a region were listed)
    or ``"limit"`` (closed form whose infimum is a limit, not attained).
    ``lower <= value <= upper`` always holds; for exact reports all three agree.
    """

    value: float
    ratios: list = field(default_factory=list)
    argmin: Optional[int] = None
    truncation: str = "exact"
    lower: float = 0.0
    upper: float = INF
    note: str = ""

    def as_dict(self) -> dict:
        def enc(x):
            return "inf" if x == INF else x
        return {"value": enc(self.value), "argmin": self.argmin, "truncation": self.truncation,
                "lower": enc(self.lower), "upper": enc(self.upper), "note": self.note}


# ---------------------------------------------------------------------------
# helpers


def _interval(shape):
    if isinstance(shape, Box):
        return shape.lower[0], shape.upper[0]
    if isinstance(shape, Ball):
        return shape.center[0] - shape.radius, shape.center[0] + shape.radius
    raise NonConvexGap("1-d gaps must be intervals")


def construction_ratio(base, level: int) -> float:
    """Lower bound for the ratio of every gap of generation ``level``."""
    if isinstance(base, S.CentralCantor):
        r = base.keep_ratio
        return float(r / (1 - 2 * r))
    grid = base.grid
    dist = min(Fraction(n - 1, 2 * n ** level) for n in grid)
    return float(dist) / geo.sqrt(sum(Fraction(1, n ** (2 * level)) for n in grid))


def _tail_ratio_inf(base, first_level: int) -> float:
    """Infimum of construction ratios over generations >= ``first_level``."""
    if isinstance(base, S.CentralCantor) or len(set(base.grid)) == 1:
        return construction_ratio(base, first_level)
    return 0.0


def _degenerate_report(hull) -> ThicknessReport:
    if hull.is_degenerate():
        return ThicknessReport(0.0, [], None, "exact", 0.0, 0.0, "set without interior and no gaps")
    return ThicknessReport(INF, [], None, "exact", INF, INF, "only the unbounded component; interior nonempty")


def _finish(enum: S.GapEnumeration, ratios: list, certified: list) -> ThicknessReport:
    """Assemble value and bounds from per-gap ratios."""
    upper, argmin = INF, None
    for (n, _, _, ratio), ok in zip(ratios, certified):
        if ok and ratio < upper:
            upper, argmin = ratio, n
    base, _, _ = S.unwrap(enum.source)
    if enum.region is not None:
        lower = upper
        if not isinstance(base, S.Explicit):
            lower = min(upper, _tail_ratio_inf(base, 1))
        elif not enum.complete:
            lower = 0.0
        return ThicknessReport(upper, ratios, argmin, "localized", lower, upper,
                               "only gaps near the region; value is an upper bound")
    if isinstance(base, S.Explicit) or enum.complete:
        return ThicknessReport(upper, ratios, argmin, "exact", upper, upper, "")
    tail = _tail_ratio_inf(base, enum.depth + 1)
    lower = min(upper, tail)
    if lower == upper:
        return ThicknessReport(upper, ratios, argmin, "exact", lower, upper,
                               "deeper generations repeat the same ratios; materialised minimum is exact")
    return ThicknessReport(upper, ratios, argmin, "truncated", lower, upper,
                           f"truncated at depth {enum.depth}")


# ---------------------------------------------------------------------------
# one dimension


def thickness_1d(enum: S.GapEnumeration) -> ThicknessReport:
    if enum.dim != 1:
        raise DimensionMismatch(f"thickness_1d needs d=1, got d={enum.dim}")
    a, b = _interval(enum.hull)
    if not enum.gaps:
        return _degenerate_report(enum.hull)
    starts: list = []   # sorted left endpoints of removed gaps
    ends: list = []     # matching right endpoints
    ratios, certified = [], []
    for g in enum.gaps:
        lo, hi = _interval(g.shape)
        k = bisect.bisect_left(starts, lo)
        left = ends[k - 1] if k > 0 else a
        right = starts[k] if k < len(starts) else b
        num = min(lo - left, right - hi)
        den = hi - lo
        ratios.append((g.index, float(num), float(den), float(Fraction(num) / Fraction(den))
                       if not isinstance(num, float) and not isinstance(den, float) else float(num) / float(den)))
        certified.append(True)
        starts.insert(k, lo)
        ends.insert(k, hi)
    if enum.region is not None:
        for i, g in enumerate(enum.gaps):
            certified[i] = ratios[i][1] <= geo.distance_to_complement(g.shape, enum.region)
    return _finish(enum, ratios, certified)


def central_cantor_thickness(keep_ratio) -> float:
    if not 0 < keep_ratio < 0.5:
        raise OutOfRange("keep_ratio must lie in (0, 1/2)")
    if isinstance(keep_ratio, (int, Fraction)):
        return float(Fraction(keep_ratio) / (1 - 2 * Fraction(keep_ratio)))
    return keep_ratio / (1 - 2 * keep_ratio)


# ---------------------------------------------------------------------------
# d dimensions


def _numerators(enum: S.GapEnumeration) -> list:
    """dist(G_n, G_1 u ... u G_{n-1} u E) for every gap of the enumeration.

    Candidate earlier gaps are found with one k-d tree per diameter class
    (powers of two), querying a radius that covers every gap closer than the
    current best value.
    """
    gaps = enum.gaps
    n = len(gaps)
    if n == 0:
        return []
    d = enum.dim
    lo = np.empty((n, d))
    hi = np.empty((n, d))
    ball_c = np.zeros((n, d))
    ball_r = np.zeros(n)
    kind = np.zeros(n, dtype=np.int8)  # 0 box, 1 ball, 2 cell union
    for i, g in enumerate(gaps):
        bb = geo.bounding_box(g.shape)
        lo[i] = [float(x) for x in bb.lower]
        hi[i] = [float(x) for x in bb.upper]
        if isinstance(g.shape, Ball):
            kind[i] = 1
            ball_c[i] = [float(x) for x in g.shape.center]
            ball_r[i] = float(g.shape.radius)
        elif isinstance(g.shape, CellUnion):
            kind[i] = 2
    centers = (lo + hi) / 2
    radii = np.sqrt(((hi - lo) ** 2).sum(axis=1)) / 2
    ext = np.array([geo.distance_to_complement(g.shape, enum.hull) for g in gaps], dtype=float)
    best = ext.copy()

    def pair_dist(i, j):
        out = np.empty(len(i))
        ki, kj = kind[i], kind[j]
        bb = (ki == 0) & (kj == 0)
        if bb.any():
            a, b = i[bb], j[bb]
            gap = np.maximum(np.maximum(lo[b] - hi[a], lo[a] - hi[b]), 0.0)
            out[bb] = np.sqrt((gap ** 2).sum(axis=1))
        cc = (ki == 1) & (kj == 1)
        if cc.any():
            a, b = i[cc], j[cc]
            out[cc] = np.maximum(np.linalg.norm(ball_c[a] - ball_c[b], axis=1) - ball_r[a] - ball_r[b], 0.0)
        mixed = ((ki == 0) & (kj == 1)) | ((ki == 1) & (kj == 0))
        if mixed.any():
            a, b = i[mixed], j[mixed]
            box = np.where((ki[mixed] == 0)[:, None], a[:, None], b[:, None])[:, 0]
            ball = np.where((ki[mixed] == 1)[:, None], a[:, None], b[:, None])[:, 0]
            gap = np.maximum(np.maximum(lo[box] - ball_c[ball], ball_c[ball] - hi[box]), 0.0)
            out[mixed] = np.maximum(np.sqrt((gap ** 2).sum(axis=1)) - ball_r[ball], 0.0)
        other = ~(bb | cc | mixed)
        for t in np.nonzero(other)[0]:
            out[t] = geo.distance(gaps[i[t]].shape, gaps[j[t]].shape)
        return out

    seen_i, seen_j, seen_d = [], [], []

    def relax(i, j):
        keep = j < i
        if not keep.any():
            return
        i, j = i[keep], j[keep]
        dist = pair_dist(i, j)
        np.minimum.at(best, i, dist)
        seen_i.append(i)
        seen_j.append(j)
        seen_d.append(dist)

    cls = np.floor(np.log2(np.maximum(radii, 1e-300))).astype(int)
    classes = []
    for c in np.unique(cls):
        members = np.nonzero(cls == c)[0]
        classes.append((members, cKDTree(centers[members]), radii[members].max()))

    idx = np.arange(n)
    # cheap first pass: a few nearest centres per class tighten ``best``
    for members, tree, _ in classes:
        k = min(8, len(members))
        _, nn = tree.query(centers, k=k)
        nn = np.asarray(nn).reshape(n, k)
        relax(np.repeat(idx, k), members[nn.ravel()])
    # exhaustive pass: every gap closer than ``best`` has its centre inside this radius
    for members, tree, rmax in classes:
        first = members.min()
        rest = idx[idx > first]
        if len(rest) == 0:
            continue
        reach = radii[rest] + rmax + best[rest] * (1 + 1e-12) + 1e-300
        hits = tree.query_ball_point(centers[rest], reach)
        ii, jj = [], []
        for t, lst in zip(rest, hits):
            if lst:
                ii.append(np.full(len(lst), t))
                jj.append(members[np.asarray(lst)])
        if ii:
            relax(np.concatenate(ii), np.concatenate(jj))
    # floats located the minimisers; re-evaluate those in the input arithmetic
    exact = [INF] * n
    slack = best * (1 + 1e-9) + 1e-300
    for i in np.nonzero(ext <= slack)[0]:
        exact[i] = geo.distance_to_complement(gaps[i].shape, enum.hull)
    if seen_i:
        i_all, j_all, d_all = (np.concatenate(x) for x in (seen_i, seen_j, seen_d))
        near = d_all <= slack[i_all]
        for i, j in zip(i_all[near], j_all[near]):
            exact[i] = min(exact[i], geo.distance(gaps[i].shape, gaps[j].shape))
    return exact


def thickness_rd(enum: S.GapEnumeration) -> ThicknessReport:
    if enum.hull is None:
        raise EmptyHull("enumeration has no hull")
    for g in enum.gaps:
        if g.shape.dim != enum.dim:
            raise DimensionMismatch("gap dimension differs from hull dimension")
    if not enum.gaps:
        return _degenerate_report(enum.hull)
    nums = _numerators(enum)
    ratios, certified = [], []
    for g, num in zip(enum.gaps, nums):
        den = geo.diameter(g.shape)
        ratios.append((g.index, num, den, num / den))
        if enum.region is not None:
            certified.append(num <= geo.distance_to_complement(g.shape, enum.region) * (1 + 1e-12))
        else:
            certified.append(True)
    return _finish(enum, ratios, certified)


def thickness(spec: S.SetDescriptor, depth: int = 3, **kw) -> ThicknessReport:
    """Convenience wrapper: enumerate then pick the 1-d or d-dimensional rule."""
    enum = S.enumerate_gaps(spec, depth, **kw)
    return thickness_1d(enum) if enum.dim == 1 else thickness_rd(enum)


# ---------------------------------------------------------------------------
# closed forms


def sponge_ratio(grid, k: int) -> float:
    dist = min(Fraction(n - 1, 2 * n ** k) for n in grid)
    return float(dist) / geo.sqrt(sum(Fraction(1, n ** (2 * k)) for n in grid))


def sponge_thickness_closed_form(grid, levels: int = 12) -> ThicknessReport:
    """Infimum over k of dist_k / diam_k for the sponge with grid ``grid``.

    With all sizes equal every level has ratio (n-1)/(2 sqrt d), attained at
    k = 1.  Otherwise the ratio decays like (n_min/n_max)^k and the infimum 0
    is a limit that no level attains.
    """
    grid = tuple(int(n) for n in grid)
    if not grid or any(n < 3 or n % 2 == 0 for n in grid):
        raise InvalidGrid(f"grid sizes must be odd and >= 3, got {grid}")
    ratios = [(k, None, None, sponge_ratio(grid, k)) for k in range(1, levels + 1)]
    if len(set(grid)) == 1:
        n, d = grid[0], len(grid)
        value = (n - 1) / (2 * math.sqrt(d))
        return ThicknessReport(value, ratios, 1, "exact", value, value, "constant ratio at every level")
    return ThicknessReport(0.0, ratios, None, "limit", 0.0, min(r[3] for r in ratios),
                           "infimum 0 approached as k grows; not attained")


# ---------------------------------------------------------------------------
# line sections


def _chord(shape, p, u):
    """Open parameter interval {t : p + t u in shape} or None."""
    if isinstance(shape, Box):
        t0, t1 = -INF, INF
        for x, v, lo, hi in zip(p, u, shape.lower, shape.upper):
            if v == 0:
                if not lo < x < hi:
                    return None
                continue
            a, b = (lo - x) / v, (hi - x) / v
            if a > b:
                a, b = b, a
            t0, t1 = max(t0, a), min(t1, b)
        return (t0, t1) if t0 < t1 else None
    if isinstance(shape, Ball):
        f = [x - c for x, c in zip(p, shape.center)]
        a = sum(v * v for v in u)
        b = 2 * sum(x * v for x, v in zip(f, u))
        c = sum(x * x for x in f) - shape.radius * shape.radius
        disc = b * b - 4 * a * c
        if disc <= 0:
            return None
        s = math.sqrt(float(disc))
        return ((-b - s) / (2 * a), (-b + s) / (2 * a))
    raise NonConvexGap("line sections need Box or Ball gaps")


def line_section(spec: S.SetDescriptor, point, direction, depth: int = 4) -> S.GapEnumeration:
    """1-d enumeration of ``C`` intersected with the line ``point + t * direction``.

    The coordinate along the line is arc length measured from ``point``.
    """
    base, _, _ = S.unwrap(spec)
    enum = S.enumerate_gaps(spec, depth)
    h = enum.hull
    if not isinstance(h, (Box, Ball)):
        raise NonConvexGap("hull must be convex")
    p = tuple(point)
    u = tuple(direction)
    if len(p) != enum.dim or len(u) != enum.dim:
        raise DimensionMismatch("line dimension differs from the set")
    norm_sq = sum(v * v for v in u)
    if norm_sq == 0:
        raise ValueError("direction must be nonzero")
    nonzero = [v for v in u if v != 0]
    if len(nonzero) == 1 and not isinstance(nonzero[0], float):
        unit = abs(Fraction(nonzero[0]))           # axis-parallel: stay rational
    else:
        unit = math.sqrt(float(norm_sq))
    hull_chord = _chord(h, p, u)
    if hull_chord is None:
        raise LineMissesSet("line does not cross the interior of the hull")
    gaps = []
    for g in enum.gaps:
        ch = _chord(g.shape, p, u)
        if ch is not None:
            gaps.append(Box((ch[0] * unit,), (ch[1] * unit,)))
    gaps.sort(key=lambda b: -(b.upper[0] - b.lower[0]))
    section = S.Explicit(Box((hull_chord[0] * unit,), (hull_chord[1] * unit,)), tuple(gaps))
    out = S.enumerate_gaps(section)
    out.tail_bound = enum.tail_bound
    out.complete = enum.complete or isinstance(base, S.Explicit)
    return out
