"""Finite-resolution oracles: rasters, brute-force intersection, box counting, pattern search.

A raster lays a grid over a frame box (side ``side_t / base_t^k`` on axis t at
level k) and classifies every cell against the depth-m approximation of a
set (its hull minus the gaps of generation <= m):

``inside``
    the closed cell lies in the approximation (certified to depth m);
``may``
    the open cell meets the approximation;
``touch``
    the closed cell meets the approximation.

``may`` contains every cell whose interior meets the set and ``touch`` every
cell whose closure does, so both are safe covers.  Sponges whose lattice lines
up with the frame are classified by base-n digits; one-dimensional sets by an
exact interval sweep; anything else by recursive subdivision.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import geometry as geo
from . import sets as S
from .errors import DegenerateRange, EmptyAtThisDepth, RasterBudgetExceeded
from .geometry import Box

DEFAULT_MAX_CELLS = 5_000_000


@dataclass(frozen=True)
class Frame:
    origin: tuple
    side: tuple
    base: tuple

    @property
    def dim(self) -> int:
        return len(self.origin)

    def cell_side(self, level: int) -> tuple:
        return tuple(Fraction(s) / b ** level for s, b in zip(self.side, self.base))

    def cell_box(self, level: int, idx) -> Box:
        cs = self.cell_side(level)
        return Box(tuple(o + i * s for o, i, s in zip(self.origin, idx, cs)),
                   tuple(o + (i + 1) * s for o, i, s in zip(self.origin, idx, cs)))


def default_frame(spec: S.SetDescriptor, base=None) -> Frame:
    """The hull's bounding box, with the construction's own base when it has one."""
    bb = geo.bounding_box(S.hull(spec))
    side = tuple(Fraction(hi) - Fraction(lo) for lo, hi in zip(bb.lower, bb.upper))
    if base is None:
        base = _natural_base(spec)
    if isinstance(base, int):
        base = (base,) * len(side)
    return Frame(tuple(Fraction(x) for x in bb.lower), side, tuple(base))


def _natural_base(spec):
    b, _, _ = S.unwrap(spec)
    if isinstance(b, S.Sponge):
        return tuple(b.grid)
    if isinstance(b, S.CentralCantor):
        inv = 1 / Fraction(b.keep_ratio)
        if inv.denominator == 1:
            return (int(inv),)
    return (2,) * b.dim


def common_frame(specs: Sequence[S.SetDescriptor], base=None) -> Frame:
    """Smallest frame covering all hulls; a shared natural base is kept."""
    boxes = [geo.bounding_box(S.hull(s)) for s in specs]
    d = boxes[0].dim
    lo = tuple(min(Fraction(b.lower[t]) for b in boxes) for t in range(d))
    hi = tuple(max(Fraction(b.upper[t]) for b in boxes) for t in range(d))
    if base is None:
        bases = {_natural_base(s) for s in specs}
        base = bases.pop() if len(bases) == 1 else (2,) * d
    if isinstance(base, int):
        base = (base,) * d
    return Frame(lo, tuple(h - l for l, h in zip(lo, hi)), tuple(base))


@dataclass
class CellGrid:
    frame: Frame
    level: int
    depth: Optional[int]
    inside: np.ndarray
    may: np.ndarray
    touch_cells: Optional[np.ndarray]
    method: str

    @property
    def touch(self) -> np.ndarray:
        """Closed-cell cover; for digit rasters the one-cell dilation of ``may``, built on demand."""
        if self.touch_cells is None:
            self.touch_cells = _dilate(self.may, self.d)
        return self.touch_cells

    @property
    def d(self) -> int:
        return self.frame.dim

    def cells(self, layer: str = "may") -> set:
        return set(map(tuple, getattr(self, layer).tolist()))

    def count(self, layer: str = "may") -> int:
        return len(getattr(self, layer))


def _arr(rows, d) -> np.ndarray:
    a = np.array(sorted(set(rows)), dtype=np.int64)
    return a.reshape(-1, d)


# ---------------------------------------------------------------------------
# sponges by digits


def _sponge_alignment(spec, frame: Frame, level: int):
    """``(sponge level, index shift)`` when sponge cells coincide with frame cells."""
    base, lam, off = S.unwrap(spec)
    if not isinstance(base, S.Sponge):
        return None
    cs = frame.cell_side(level)
    lam = Fraction(lam)
    k = None
    for t, n in enumerate(base.grid):
        ratio = lam / cs[t]
        # need ratio = n^k for a single k shared by all axes
        kk = 0
        while ratio.denominator == 1 and ratio.numerator % n == 0 and ratio > 1:
            ratio /= n
            kk += 1
        if ratio != 1 or (k is not None and kk != k):
            return None
        k = kk
    shift = []
    for t in range(frame.dim):
        s = (Fraction(off[t]) - frame.origin[t]) / cs[t]
        if s.denominator != 1:
            return None
        shift.append(s.numerator)
    return k, np.array(shift, dtype=np.int64)


def sponge_cells(grid, level: int, depth: Optional[int] = None, max_cells: int = DEFAULT_MAX_CELLS) -> np.ndarray:
    """Indices of the surviving level-``level`` cells of a sponge truncated at ``depth``."""
    grid = tuple(grid)
    d = len(grid)
    idx = np.zeros((1, d), dtype=np.int64)
    full = np.array(list(itertools.product(*(range(n) for n in grid))), dtype=np.int64)
    mid = np.array([(n - 1) // 2 for n in grid], dtype=np.int64)
    holed = full[~np.all(full == mid, axis=1)]
    n_arr = np.array(grid, dtype=np.int64)
    for j in range(1, level + 1):
        kids = holed if depth is None or j <= depth else full
        if len(idx) * len(kids) > max_cells:
            raise RasterBudgetExceeded(f"{len(idx) * len(kids)} cells exceed the budget {max_cells}")
        idx = (idx[:, None, :] * n_arr + kids[None, :, :]).reshape(-1, d)
    return idx


def _dilate(cells: np.ndarray, d: int) -> np.ndarray:
    offs = np.array(list(itertools.product((-1, 0, 1), repeat=d)), dtype=np.int64)
    out = (cells[:, None, :] + offs[None, :, :]).reshape(-1, d)
    return np.unique(out, axis=0)


def _raster_sponge(spec, frame, level, depth, align, max_cells) -> CellGrid:
    base, _, _ = S.unwrap(spec)
    k, shift = align
    eff = base.depth if depth is None else (depth if base.depth is None else min(depth, base.depth))
    cells = sponge_cells(base.grid, k, eff, max_cells) + shift
    return CellGrid(frame, level, k if eff is None else min(k, eff), cells, cells, None, "digits")


# ---------------------------------------------------------------------------
# one dimension by intervals


def approximation_intervals(spec, depth: int) -> list:
    """Closed intervals whose union is the hull minus the gaps of generation <= depth."""
    hull = geo.bounding_box(S.hull(spec))
    a, b = Fraction(hull.lower[0]), Fraction(hull.upper[0])
    enum = S.enumerate_gaps(spec, depth)
    cuts = sorted((Fraction(g.shape.lower[0]), Fraction(g.shape.upper[0])) for g in enum.gaps
                  if isinstance(g.shape, Box))
    out, cur = [], a
    for lo, hi in cuts:
        out.append((cur, lo))
        cur = hi
    out.append((cur, b))
    return out


def _auto_depth(spec, frame: Frame, level: int) -> Optional[int]:
    """Deepest generation whose pieces still cover a whole cell.

    A piece must span one cell when the grid follows the construction and two
    cells otherwise, so that it contains at least one full cell.
    """
    base, lam, _ = S.unwrap(spec)
    if isinstance(base, S.CentralCantor):
        a, b = base.interval
        piece = Fraction(lam) * (b - a)
        cs = frame.cell_side(level)[0]
        aligned = frame.base == _natural_base(spec) and frame.base[0] != 2
        span = 1 if aligned else 2
        m = 0
        while piece * base.keep_ratio >= span * cs:
            piece *= base.keep_ratio
            m += 1
        m = max(m, 1)
        return m if base.depth is None else min(m, base.depth)
    if isinstance(base, S.Sponge):
        cs = min(frame.cell_side(level))
        m, piece = 0, Fraction(lam)
        while piece / max(base.grid) >= cs:
            piece /= max(base.grid)
            m += 1
        m = max(m, 1)
        return m if base.depth is None else min(m, base.depth)
    return None


def _floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _raster_1d(spec, frame, level, depth, max_cells) -> CellGrid:
    o = frame.origin[0]
    s = frame.cell_side(level)[0]
    ivs = approximation_intervals(spec, depth if depth is not None else 64)
    inside, may, touch = [], [], []
    total = 0
    for a, b in ivs:
        ua, ub = (a - o) / s, (b - o) / s
        if a < b:
            may_r = range(_floor(ua), _ceil(ub))
        else:
            may_r = range(_floor(ua), _floor(ua) + 1) if ua.denominator != 1 else range(0)
        touch_r = range(_ceil(ua) - 1, _floor(ub) + 1)
        ins_r = range(_ceil(ua), _floor(ub))
        total += len(touch_r)
        if total > max_cells:
            raise RasterBudgetExceeded(f"more than {max_cells} cells")
        inside.extend(ins_r)
        may.extend(may_r)
        touch.extend(touch_r)
    f = lambda xs: _arr(((x,) for x in xs), 1)
    return CellGrid(frame, level, depth, f(inside), f(may), f(touch), "intervals")


# ---------------------------------------------------------------------------
# general subdivision


def _cell_in_gap_closure(cell: Box, g) -> bool:
    if isinstance(g, geo.CellUnion):
        return any(geo.closure_within_closed(cell, b) for b in g.boxes)
    return geo.closure_within_closed(cell, g)


def _cell_in_open_gap(cell: Box, g) -> bool:
    if isinstance(g, geo.CellUnion):
        return any(geo.closure_within_open(cell, b) for b in g.boxes)
    return geo.closure_within_open(cell, g)


def _raster_generic(spec, frame, level, depth, max_cells) -> CellGrid:
    hull = S.hull(spec)
    d = frame.dim
    m = depth if depth is not None else 64
    inside, may, touch = [], [], []
    visited = [0]

    def all_leaves(lvl, idx):
        span = [range(i * b ** (level - lvl), (i + 1) * b ** (level - lvl)) for i, b in zip(idx, frame.base)]
        return itertools.product(*span)

    def rec(lvl, idx):
        visited[0] += 1
        if visited[0] > max_cells:
            raise RasterBudgetExceeded(f"more than {max_cells} cells visited")
        cell = frame.cell_box(lvl, idx)
        if geo.closures_disjoint(cell, hull):
            return
        gaps = [g.shape for g in S.enumerate_gaps(spec, m, region=cell).gaps]
        if any(_cell_in_open_gap(cell, g) for g in gaps):
            return
        if geo.closure_within_closed(cell, hull) and not any(geo.intersects_open(g, cell) for g in gaps):
            leaves = list(all_leaves(lvl, idx))
            if len(inside) + len(leaves) > max_cells:
                raise RasterBudgetExceeded(f"more than {max_cells} cells")
            inside.extend(leaves)
            may.extend(leaves)
            touch.extend(leaves)
            return
        if lvl == level:
            touch.append(tuple(idx))
            if geo.intersects_open(cell, hull) and not any(_cell_in_gap_closure(cell, g) for g in gaps):
                may.append(tuple(idx))
            return
        for kid in itertools.product(*(range(i * b, i * b + b) for i, b in zip(idx, frame.base))):
            rec(lvl + 1, kid)

    rec(0, (0,) * d)
    # cells outside the frame cannot meet the set: the frame covers the hull
    return CellGrid(frame, level, depth, _arr(inside, d), _arr(may, d), _arr(touch, d), "subdivision")


def rasterize(spec: S.SetDescriptor, level: int, frame: Optional[Frame] = None, depth: Optional[int] = None,
              max_cells: int = DEFAULT_MAX_CELLS) -> CellGrid:
    """Two-sided grid of ``spec`` at ``level``.

    ``depth`` is the generation of the approximation used for the ``inside``
    layer; by default a sponge aligned with the frame uses the sponge level
    matching the cells, a Cantor set the deepest generation whose pieces span
    two cells, and an explicit set all of its gaps.
    """
    if level < 0:
        raise ValueError("level must be >= 0")
    frame = default_frame(spec) if frame is None else frame
    if frame.dim != spec.dim:
        raise ValueError("frame and set dimensions differ")
    align = _sponge_alignment(spec, frame, level)
    if align is not None:
        return _raster_sponge(spec, frame, level, depth, align, max_cells)
    if depth is None:
        depth = _auto_depth(spec, frame, level)
    if spec.dim == 1:
        return _raster_1d(spec, frame, level, depth, max_cells)
    return _raster_generic(spec, frame, level, depth, max_cells)


# ---------------------------------------------------------------------------
# intersections


@dataclass
class NonemptyWitness:
    cell: tuple
    box: Box
    level: int


@dataclass
class CertifiedDisjoint:
    level: int


@dataclass
class PossiblyEmpty:
    level: int
    candidates: int


def brute_intersection(specs: Sequence[S.SetDescriptor], level: int, frame: Optional[Frame] = None,
                       depth: Optional[int] = None, max_cells: int = DEFAULT_MAX_CELLS):
    """Intersect the rasters of several sets on one grid."""
    specs = list(specs)
    if not specs:
        raise ValueError("need at least one set")
    if len({s.dim for s in specs}) != 1:
        raise ValueError("sets differ in dimension")
    frame = common_frame(specs) if frame is None else frame
    grids = [rasterize(s, level, frame, depth, max_cells) for s in specs]
    touch = set.intersection(*(g.cells("touch") for g in grids))
    if not touch:
        return CertifiedDisjoint(level)
    inside = set.intersection(*(g.cells("inside") for g in grids))
    if inside:
        cell = min(inside)
        return NonemptyWitness(cell, frame.cell_box(level, cell), level)
    return PossiblyEmpty(level, len(touch))


# ---------------------------------------------------------------------------
# box counting


@dataclass
class DimensionEstimate:
    slope: float
    scales: list
    counts: list
    residual: float
    note: str = ""


def box_counting(spec: S.SetDescriptor, levels: Sequence[int], frame: Optional[Frame] = None,
                 max_cells: int = DEFAULT_MAX_CELLS) -> DimensionEstimate:
    """Least-squares slope of ``log count`` against ``log(1/scale)`` on the ``may`` layer."""
    levels = sorted(set(levels))
    if len(levels) < 4:
        raise DegenerateRange("box counting needs at least four levels")
    frame = default_frame(spec) if frame is None else frame
    scales, counts = [], []
    for k in levels:
        g = rasterize(spec, k, frame, max_cells=max_cells)
        scales.append(float(max(frame.cell_side(k))))
        counts.append(g.count("may"))
    if any(c == 0 for c in counts):
        raise DegenerateRange("empty raster at some level")
    x = -np.log(np.array(scales))
    y = np.log(np.array(counts, dtype=float))
    if np.ptp(x) == 0:
        raise DegenerateRange("all scales coincide")
    slope, icept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + icept)) ** 2)))
    note = ""
    d = spec.dim
    if slope > d or slope < 0:
        note = f"raw slope {slope:.4f} clipped to [0, {d}]"
        slope = min(max(slope, 0.0), float(d))
    return DimensionEstimate(float(slope), scales, counts, resid, note)


# ---------------------------------------------------------------------------
# patterns


@dataclass
class PatternWitness:
    x: tuple
    """Lower corner of the certified cell; ``x + lam a`` is a cell corner for each pattern point ``a``."""
    cell: tuple
    points: list = field(default_factory=list)


def pattern_search(spec: S.SetDescriptor, pattern: Sequence, lam, level: int, frame: Optional[Frame] = None,
                   depth: Optional[int] = None, theorem_mode: bool = False, limit: Optional[int] = None,
                   max_cells: int = DEFAULT_MAX_CELLS) -> list:
    """Translates ``x`` with ``x + lam a`` certified in ``spec`` for every ``a`` in ``pattern``.

    Computes the common ``inside`` cells of the rasters of ``spec - lam a``.
    In theorem mode ``lam`` must lie below ``diam(hull) / (16 diam(pattern))``.
    Raises :class:`EmptyAtThisDepth` when nothing is certified, which is not
    evidence that no copy exists.
    """
    pattern = [tuple(Fraction(v) for v in a) for a in pattern]
    if not pattern:
        raise ValueError("the pattern needs at least one point")
    lam = Fraction(lam)
    if theorem_mode and len(pattern) > 1:
        diam_a = max(geo.point_distance(p, q) for p, q in itertools.combinations(pattern, 2))
        if not lam < S.diameter(spec) / (16 * diam_a):
            raise ValueError("lam is outside the theorem's range")
    frame = default_frame(spec) if frame is None else frame
    shifted = [S.apply_homothety(spec, 1, tuple(-lam * v for v in a)) for a in pattern]
    common = None
    for sp in shifted:
        cells = rasterize(sp, level, frame, depth, max_cells).cells("inside")
        common = cells if common is None else common & cells
        if not common:
            break
    if not common:
        raise EmptyAtThisDepth(f"no certified translate at level {level}")
    out = []
    for cell in sorted(common):
        x = frame.cell_box(level, cell).lower
        out.append(PatternWitness(x, cell, [tuple(xi + lam * ai for xi, ai in zip(x, a)) for a in pattern]))
        if limit is not None and len(out) >= limit:
            break
    return out


# ---------------------------------------------------------------------------
# independent membership tests


def in_sponge(point, grid, depth: Optional[int] = None, max_levels: int = 200) -> bool:
    """Digit test for the closed sponge on ``[0, 1]^d``, exact for rational points.

    A point is removed at level j when it lies in the open middle cell of a
    level-(j-1) cell, which requires every coordinate to avoid the level-j
    grid lines and to have middle digit there.
    """
    p = [Fraction(v) for v in point]
    if any(v < 0 or v > 1 for v in p):
        return False
    top = max_levels if depth is None else depth
    for j in range(1, top + 1):
        mids = True
        on_lines = False
        for v, n in zip(p, grid):
            u = v * n ** j
            if u.denominator == 1:
                on_lines = True
                break
            if (_floor(u) % n) != (n - 1) // 2:
                mids = False
        if on_lines and depth is None:
            # a finite expansion: deeper levels put the point on grid lines too
            return True
        if not on_lines and mids:
            return False
    return True


def in_cantor(x, interval=(0, 1), keep_ratio=Fraction(1, 3), depth: int = 60) -> bool:
    """Membership in a central Cantor set by following the construction down ``depth`` levels."""
    a, b = (Fraction(v) for v in interval)
    x = Fraction(x)
    r = Fraction(keep_ratio)
    if not a <= x <= b:
        return False
    for _ in range(depth):
        seg = b - a
        left_hi, right_lo = a + r * seg, b - r * seg
        if x <= left_hi:
            b = left_hi
        elif x >= right_lo:
            a = right_lo
        else:
            return False
    return True


def cantor_distance_oracle(x, interval=(0, 1), keep_ratio=Fraction(1, 3), depth: int = 60) -> float:
    """Distance from ``x`` to a central Cantor set, exact up to the depth-``depth`` piece size."""
    a, b = (Fraction(v) for v in interval)
    x = Fraction(x)
    r = Fraction(keep_ratio)
    if x <= a:
        return float(a - x)
    if x >= b:
        return float(x - b)
    for _ in range(depth):
        seg = b - a
        left_hi, right_lo = a + r * seg, b - r * seg
        if x <= left_hi:
            b = left_hi
        elif x >= right_lo:
            a = right_lo
        else:
            return float(min(x - left_hi, right_lo - x))
    return 0.0
