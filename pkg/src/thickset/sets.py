"""Compact sets described by a hull and their complementary gaps.

Three base families are supported:

* :class:`Explicit` -- a Box or Ball hull with a finite list of open gaps.
* :class:`CentralCantor` -- an interval that keeps two end pieces of relative
  length ``keep_ratio`` at every step.
* :class:`Sponge` -- the Sierpinski sponge on ``[0, 1]^d`` with odd grid sizes,
  removing the central cell of every surviving cell.

:class:`Translate` and :class:`Scale` wrap any descriptor.  Generative
families use exact rational coordinates.
"""
from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Union

from . import geometry as geo
from .errors import DepthOverflow, MalformedDescriptor
from .geometry import Ball, Box, CellUnion, Shape

DEFAULT_MAX_GAPS = 10**6


@dataclass(frozen=True)
class Explicit:
    hull: Union[Box, Ball]
    gaps: tuple = ()

    @property
    def dim(self) -> int:
        return self.hull.dim


@dataclass(frozen=True)
class CentralCantor:
    interval: tuple = (Fraction(0), Fraction(1))
    keep_ratio: Fraction = Fraction(1, 3)
    depth: Optional[int] = None

    def __post_init__(self):
        a, b = self.interval
        if not a <= b:
            raise MalformedDescriptor("interval endpoints out of order")
        if not 0 < self.keep_ratio < Fraction(1, 2):
            raise MalformedDescriptor("keep_ratio must lie in (0, 1/2)")
        if self.depth is not None and self.depth < 1:
            raise MalformedDescriptor("depth must be positive")

    @property
    def dim(self) -> int:
        return 1


@dataclass(frozen=True)
class Sponge:
    grid: tuple = (3, 3)
    depth: Optional[int] = None

    def __post_init__(self):
        if not self.grid or any(n < 3 or n % 2 == 0 for n in self.grid):
            raise MalformedDescriptor(f"grid sizes must be odd and >= 3, got {self.grid}")
        if self.depth is not None and self.depth < 1:
            raise MalformedDescriptor("depth must be positive")

    @property
    def dim(self) -> int:
        return len(self.grid)


@dataclass(frozen=True)
class Translate:
    inner: "SetDescriptor"
    offset: tuple

    @property
    def dim(self) -> int:
        return self.inner.dim


@dataclass(frozen=True)
class Scale:
    inner: "SetDescriptor"
    factor: Fraction

    def __post_init__(self):
        if not self.factor > 0:
            raise MalformedDescriptor("scale factor must be positive")

    @property
    def dim(self) -> int:
        return self.inner.dim


SetDescriptor = Union[Explicit, CentralCantor, Sponge, Translate, Scale]
BaseDescriptor = Union[Explicit, CentralCantor, Sponge]


@dataclass(frozen=True)
class Gap:
    """An open bounded complementary component.

    ``key`` orders gaps: non-increasing diameter, then generation, then cell
    index.  ``index`` is the 1-based position inside one enumeration.
    """

    shape: Shape
    key: tuple
    level: int = 0
    index: int = 0

    @property
    def diameter(self) -> float:
        return geo.diameter(self.shape)


@dataclass
class GapEnumeration:
    source: SetDescriptor
    depth: int
    gaps: list
    tail_bound: float
    hull: Union[Box, Ball]
    region: Optional[Box] = None
    complete: bool = False
    """True when no gap of the set is missing (finite sets fully listed)."""

    @property
    def dim(self) -> int:
        return self.hull.dim


# ---------------------------------------------------------------------------
# affine unwrapping


def unwrap(spec: SetDescriptor):
    """Return ``(base, lam, offset)`` with ``spec == lam * base + offset``."""
    if isinstance(spec, Translate):
        base, lam, off = unwrap(spec.inner)
        return base, lam, geo.add(off, tuple(spec.offset))
    if isinstance(spec, Scale):
        base, lam, off = unwrap(spec.inner)
        return base, lam * spec.factor, geo.scale(off, spec.factor)
    return spec, 1, (0,) * spec.dim


def apply_homothety(spec: SetDescriptor, lam, offset=None) -> SetDescriptor:
    """Descriptor of ``lam * spec + offset``."""
    if not lam > 0:
        raise MalformedDescriptor("homothety factor must be positive")
    offset = tuple(offset) if offset is not None else (0,) * spec.dim
    if len(offset) != spec.dim:
        raise MalformedDescriptor("offset dimension mismatch")
    out = spec if lam == 1 else Scale(spec, lam)
    if any(x != 0 for x in offset):
        out = Translate(out, offset)
    return out


def base_hull(base: BaseDescriptor):
    if isinstance(base, Explicit):
        return base.hull
    if isinstance(base, CentralCantor):
        a, b = base.interval
        return Box((a,), (b,))
    return Box((Fraction(0),) * base.dim, (Fraction(1),) * base.dim)


def hull(spec: SetDescriptor):
    base, lam, off = unwrap(spec)
    return geo.transform(base_hull(base), lam, off)


def diameter(spec: SetDescriptor) -> float:
    """Diameter of the set (that of its hull for all supported families)."""
    return geo.diameter(hull(spec))


# ---------------------------------------------------------------------------
# validation


def validate(spec: SetDescriptor) -> None:
    base, _, _ = unwrap(spec)
    if isinstance(base, Explicit):
        _validate_explicit(base)


@functools.lru_cache(maxsize=128)
def _validate_explicit(spec: Explicit) -> None:
    d = spec.hull.dim
    for g in spec.gaps:
        if g.dim != d:
            raise MalformedDescriptor("gap dimension differs from hull dimension")
        if geo.diameter(g) <= 0:
            raise MalformedDescriptor("gaps must have positive diameter")
        if not geo.closure_within_closed(g, spec.hull):
            raise MalformedDescriptor(f"gap {g} escapes the hull")
    boxes = sorted(((geo.bounding_box(g), i) for i, g in enumerate(spec.gaps)),
                   key=lambda t: t[0].lower[0])
    active = []
    for bb, i in boxes:
        active = [(b2, j) for b2, j in active if b2.upper[0] > bb.lower[0]]
        for _, j in active:
            if geo.intersects_open(spec.gaps[i], spec.gaps[j]):
                raise MalformedDescriptor(f"gaps {j} and {i} overlap")
        active.append((bb, i))


# ---------------------------------------------------------------------------
# enumeration


def _region_meets(region: Optional[Box], box: Box) -> bool:
    if region is None:
        return True
    return all(max(a, c) <= min(b, e) for a, b, c, e in
               zip(box.lower, box.upper, region.lower, region.upper))


def _cantor_gaps(base: CentralCantor, depth: int, region, max_gaps: int) -> Iterator[Gap]:
    a, b = base.interval
    r = base.keep_ratio
    length = b - a
    gap_frac = 1 - 2 * r
    if region is None and 2 ** depth - 1 > max_gaps:
        raise DepthOverflow(f"{2 ** depth - 1} gaps at depth {depth} exceed the cap {max_gaps}")
    cells = [(0, a)]  # (binary index, left endpoint) of surviving level-(j-1) intervals
    emitted = 0
    for j in range(1, depth + 1):
        seg = length * r ** (j - 1)
        nxt = []
        for idx, x in cells:
            cell = Box((x,), (x + seg,))
            if not _region_meets(region, cell):
                continue
            g = Box((x + r * seg,), (x + seg - r * seg,))
            if _region_meets(region, g):
                emitted += 1
                if emitted > max_gaps:
                    raise DepthOverflow(f"more than {max_gaps} gaps")
                diam = (gap_frac * seg)
                yield Gap(g, (-(diam * diam), j, (idx,)), level=j)
            nxt.append((2 * idx, x))
            nxt.append((2 * idx + 1, x + seg - r * seg))
        cells = nxt


def sponge_cell_box(grid, level: int, cell) -> Box:
    return Box(tuple(Fraction(c, n ** level) for c, n in zip(cell, grid)),
               tuple(Fraction(c + 1, n ** level) for c, n in zip(cell, grid)))


def sponge_gap_box(grid, level: int, parent) -> Box:
    """Central cell removed at ``level`` from the surviving ``parent`` cell of level-1."""
    return Box(tuple(Fraction(c * n + (n - 1) // 2, n ** level) for c, n in zip(parent, grid)),
               tuple(Fraction(c * n + (n + 1) // 2, n ** level) for c, n in zip(parent, grid)))


def _sponge_children(grid, cell):
    import itertools
    center = tuple((n - 1) // 2 for n in grid)
    for digits in itertools.product(*(range(n) for n in grid)):
        if digits == center:
            continue
        yield tuple(c * n + e for c, n, e in zip(cell, grid, digits))


def _sponge_gaps(base: Sponge, depth: int, region, max_gaps: int) -> Iterator[Gap]:
    grid = base.grid
    if region is None:
        per = math.prod(grid) - 1
        total = sum(per ** (j - 1) for j in range(1, depth + 1))
        if total > max_gaps:
            raise DepthOverflow(f"{total} gaps at depth {depth} exceed the cap {max_gaps}")
    cells = [(0,) * len(grid)]
    emitted = 0
    for j in range(1, depth + 1):
        diam_sq = sum(Fraction(1, n ** (2 * j)) for n in grid)
        nxt = []
        for cell in cells:
            if region is not None and not _region_meets(region, sponge_cell_box(grid, j - 1, cell)):
                continue
            g = sponge_gap_box(grid, j, cell)
            if _region_meets(region, g):
                emitted += 1
                if emitted > max_gaps:
                    raise DepthOverflow(f"more than {max_gaps} gaps")
                yield Gap(g, (-diam_sq, j, cell), level=j)
            if j < depth:
                nxt.extend(_sponge_children(grid, cell))
        cells = nxt


def _explicit_gaps(base: Explicit, region) -> Iterator[Gap]:
    for i, g in enumerate(base.gaps):
        if region is None or _region_meets(region, geo.bounding_box(g)):
            yield Gap(g, (-g.diameter_sq(), 0, (i,)), level=0)


def _transform_gap(g: Gap, lam, off) -> Gap:
    if lam == 1 and not any(off):
        return g
    return Gap(geo.transform(g.shape, lam, off), g.key, g.level, g.index)


def base_tail(base: BaseDescriptor, depth: int):
    """Upper bound on the diameter of any gap beyond generation ``depth``."""
    if isinstance(base, Explicit):
        return 0
    if base.depth is not None and base.depth <= depth:
        return 0
    if isinstance(base, CentralCantor):
        a, b = base.interval
        return (1 - 2 * base.keep_ratio) * base.keep_ratio ** depth * (b - a)
    return geo.sqrt(sum(Fraction(1, n ** (2 * (depth + 1))) for n in base.grid))


def enumerate_gaps(spec: SetDescriptor, depth: int = 1, *, region: Optional[Box] = None,
                   max_gaps: int = DEFAULT_MAX_GAPS) -> GapEnumeration:
    """All gaps of generation <= ``depth`` sorted by non-increasing diameter.

    With ``region`` only the gaps whose closure meets the closed box are
    materialised; every other gap of generation <= depth lies outside it.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    validate(spec)
    base, lam, off = unwrap(spec)
    base_region = None
    if region is not None:
        inv = Fraction(1) / Fraction(lam) if not isinstance(lam, float) else 1 / lam
        base_region = Box(tuple((x - o) * inv for x, o in zip(region.lower, off)),
                          tuple((x - o) * inv for x, o in zip(region.upper, off)))
    if isinstance(base, Explicit):
        raw = list(_explicit_gaps(base, base_region))
        eff = depth
        complete = region is None
    else:
        eff = depth if base.depth is None else min(depth, base.depth)
        gen = _cantor_gaps if isinstance(base, CentralCantor) else _sponge_gaps
        raw = list(gen(base, eff, base_region, max_gaps))
        complete = region is None and base.depth is not None and base.depth <= depth
    raw.sort(key=lambda g: g.key)
    gaps = [Gap(_transform_gap(g, lam, off).shape, g.key, g.level, i + 1) for i, g in enumerate(raw)]
    tail = base_tail(base, eff)
    return GapEnumeration(source=spec, depth=eff, gaps=gaps, tail_bound=float(tail * lam),
                          hull=hull(spec), region=region, complete=complete)


def distance_to_external(gap: Union[Gap, Shape], spec: SetDescriptor) -> float:
    """Distance from a gap to the unbounded complementary component."""
    shape = gap.shape if isinstance(gap, Gap) else gap
    return geo.distance_to_complement(shape, hull(spec))


# ---------------------------------------------------------------------------
# separation of individual gaps and point location


def construction_separation(spec: SetDescriptor, gap: Gap) -> float:
    """Certified lower bound on ``dist(gap, earlier gaps and E)``.

    For generative families this is the distance from the gap to the boundary
    of the cell it was removed from; that cell's interior meets no earlier gap.
    """
    base, lam, off = unwrap(spec)
    if isinstance(base, Explicit):
        return 0.0
    if isinstance(base, CentralCantor):
        a, b = base.interval
        return float(lam * base.keep_ratio ** gap.level * (b - a))
    j = gap.level
    return float(lam * min(Fraction(n - 1, 2 * n ** j) for n in base.grid))


@functools.lru_cache(maxsize=32)
def _explicit_separations(spec: Explicit) -> tuple:
    from .thickness import _numerators
    enum = enumerate_gaps(spec)
    return tuple(zip((g.key for g in enum.gaps), _numerators(enum)))


def gap_separation(spec: SetDescriptor, gap: Gap) -> float:
    """``dist(G_n, G_1 u ... u G_{n-1} u E)`` for a gap of ``spec``."""
    base, lam, off = unwrap(spec)
    if isinstance(base, CentralCantor):
        return construction_separation(spec, gap)
    if isinstance(base, Explicit):
        for key, sep in _explicit_separations(base):
            if key == gap.key:
                return float(lam) * sep
        raise KeyError("gap not found in descriptor")
    # sponge: search outward until the nearest earlier gap or E is certified
    ext = distance_to_external(gap, spec)
    radius = max(2 * construction_separation(spec, gap), 1e-300)
    bb = geo.bounding_box(gap.shape)
    while True:
        if radius >= ext:
            radius = ext
        region = Box(tuple(x - radius for x in bb.lower), tuple(x + radius for x in bb.upper))
        enum = enumerate_gaps(spec, gap.level, region=region)
        best = ext
        for other in enum.gaps:
            if other.key < gap.key:
                best = min(best, geo.distance(gap.shape, other.shape))
        if best <= radius or radius >= ext:
            return best
        radius *= 2


def locate(spec: SetDescriptor, point, max_depth: int = 60):
    """Classify a point: ``("E", None)``, ``("gap", Gap)``, ``("set", None)`` or
    ``("undecided", None)``.

    ``"set"`` is returned only when membership is certain: boundary points of
    kept cells, points of finite-depth sets, and explicit sets.
    ``"undecided"`` means the point survives ``max_depth`` generations of an
    unbounded construction.
    """
    base, lam, off = unwrap(spec)
    p = tuple(geo.to_fraction(x) for x in point)
    lam_f = geo.to_fraction(lam)
    q = tuple((x - geo.to_fraction(o)) / lam_f for x, o in zip(p, off))
    kind, g = _locate_base(base, q, max_depth)
    if g is not None:
        g = _transform_gap(g, lam, off)
    return kind, g


def _locate_base(base: BaseDescriptor, p, max_depth: int):
    h = base_hull(base)
    if not geo.contains_point(h, p, closed=True):
        return "E", None
    if isinstance(base, Explicit):
        for i, g in enumerate(base.gaps):
            if geo.contains_point(g, p):
                return "gap", Gap(g, (-g.diameter_sq(), 0, (i,)), level=0)
        return "set", None
    limit = max_depth if base.depth is None else min(max_depth, base.depth)
    if isinstance(base, CentralCantor):
        a, b = base.interval
        r = base.keep_ratio
        x, seg, idx = a, b - a, 0
        (t,) = p
        for j in range(1, limit + 1):
            lo, hi = x + r * seg, x + seg - r * seg
            if lo < t < hi:
                diam = (1 - 2 * r) * seg
                return "gap", Gap(Box((lo,), (hi,)), (-(diam * diam), j, (idx,)), level=j)
            if t == lo or t == hi or t == x or t == x + seg:
                return "set", None
            if t < lo:
                idx = 2 * idx
            else:
                idx, x = 2 * idx + 1, hi
            seg = r * seg
        return ("set" if base.depth is not None and limit == base.depth else "undecided"), None
    grid = base.grid
    cell = (0,) * len(grid)
    for j in range(1, limit + 1):
        g = sponge_gap_box(grid, j, cell)
        if geo.contains_point(g, p):
            diam_sq = sum(Fraction(1, n ** (2 * j)) for n in grid)
            return "gap", Gap(g, (-diam_sq, j, cell), level=j)
        sub = []
        for x, c, n in zip(p, cell, grid):
            y = x * n ** j - c * n
            digit = math.floor(y)
            if y == digit:
                # on a face of a kept subcell: such faces stay in the set
                return "set", None
            sub.append(c * n + digit)
        cell = tuple(sub)
    return ("set" if base.depth is not None and limit == base.depth else "undecided"), None


# ---------------------------------------------------------------------------
# JSON-syntax descriptor files


def _num(x):
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, bool):
        raise MalformedDescriptor("boolean where a number was expected")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    raise MalformedDescriptor(f"not a number: {x!r}")


def _pt(xs):
    return tuple(_num(x) for x in xs)


def shape_from_dict(obj) -> Shape:
    if "box" in obj:
        return Box(_pt(obj["box"]["lower"]), _pt(obj["box"]["upper"]))
    if "ball" in obj:
        return Ball(_pt(obj["ball"]["center"]), _num(obj["ball"]["radius"]))
    if "cells" in obj:
        return CellUnion(tuple(shape_from_dict({"box": c}) for c in obj["cells"]))
    raise MalformedDescriptor(f"unknown shape {sorted(obj)}")


def from_dict(obj: dict) -> SetDescriptor:
    try:
        variant = obj["variant"]
    except KeyError:
        raise MalformedDescriptor("missing 'variant'") from None
    schema = obj.get("schema", 1)
    if schema != 1:
        raise MalformedDescriptor(f"unsupported schema version {schema}")
    try:
        if variant == "Explicit":
            return Explicit(shape_from_dict(obj["hull"]), tuple(shape_from_dict(g) for g in obj.get("gaps", [])))
        if variant == "CentralCantor":
            return CentralCantor(_pt(obj.get("interval", [0, 1])), _num(obj["keep_ratio"]), obj.get("depth"))
        if variant == "Sponge":
            return Sponge(tuple(int(n) for n in obj["grid"]), obj.get("depth"))
        if variant == "Translate":
            return Translate(from_dict(obj["inner"]), _pt(obj["offset"]))
        if variant == "Scale":
            return Scale(from_dict(obj["inner"]), _num(obj["factor"]))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise MalformedDescriptor(f"bad {variant} descriptor: {exc}") from exc
    raise MalformedDescriptor(f"unknown variant {variant!r}")


def _enc(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    return x


def shape_to_dict(s: Shape) -> dict:
    if isinstance(s, Box):
        return {"box": {"lower": [_enc(x) for x in s.lower], "upper": [_enc(x) for x in s.upper]}}
    if isinstance(s, Ball):
        return {"ball": {"center": [_enc(x) for x in s.center], "radius": _enc(s.radius)}}
    return {"cells": [shape_to_dict(b)["box"] for b in s.boxes]}


def to_dict(spec: SetDescriptor) -> dict:
    if isinstance(spec, Explicit):
        body = {"variant": "Explicit", "hull": shape_to_dict(spec.hull), "gaps": [shape_to_dict(g) for g in spec.gaps]}
    elif isinstance(spec, CentralCantor):
        body = {"variant": "CentralCantor", "interval": [_enc(x) for x in spec.interval],
                "keep_ratio": _enc(spec.keep_ratio), "depth": spec.depth}
    elif isinstance(spec, Sponge):
        body = {"variant": "Sponge", "grid": list(spec.grid), "depth": spec.depth}
    elif isinstance(spec, Translate):
        body = {"variant": "Translate", "inner": to_dict(spec.inner), "offset": [_enc(x) for x in spec.offset]}
    else:
        body = {"variant": "Scale", "inner": to_dict(spec.inner), "factor": _enc(spec.factor)}
    return {"schema": 1, **body}


def load(path) -> SetDescriptor:
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedDescriptor(f"{path}: {exc}") from exc
    return from_dict(obj)


def dump(spec: SetDescriptor, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(spec), fh, indent=2)
        fh.write("\n")
