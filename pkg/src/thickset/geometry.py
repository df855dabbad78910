"""Geometric primitives: points, axis-aligned boxes, balls and cell unions.

Coordinates are plain tuples.  Entries may be ``int``, ``Fraction`` or
``float``; squared distances between boxes stay exact when the inputs are
rational, and square roots are taken only at the end.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Sequence, Union

Point = tuple


def as_point(coords: Sequence[Real]) -> Point:
    p = tuple(coords)
    if not p:
        raise ValueError("a point needs at least one coordinate")
    for x in p:
        if isinstance(x, float) and not math.isfinite(x):
            raise ValueError(f"non-finite coordinate {x!r}")
    return p


def sqrt(x) -> float:
    return math.sqrt(float(x))


def norm_sq(v: Sequence[Real]):
    return sum(x * x for x in v)


def sub(p: Point, q: Point) -> Point:
    return tuple(a - b for a, b in zip(p, q))


def add(p: Point, q: Point) -> Point:
    return tuple(a + b for a, b in zip(p, q))


def scale(p: Point, lam) -> Point:
    return tuple(lam * a for a in p)


def point_distance(p: Point, q: Point) -> float:
    return sqrt(norm_sq(sub(p, q)))


@dataclass(frozen=True)
class Box:
    """Axis-aligned box.  As a gap it is the open box; as a hull, the closed one."""

    lower: Point
    upper: Point

    def __post_init__(self):
        if len(self.lower) != len(self.upper):
            raise ValueError("box corners differ in dimension")
        if any(lo > hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError(f"box corners out of order: {self.lower} > {self.upper}")

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def sides(self) -> tuple:
        return tuple(hi - lo for lo, hi in zip(self.lower, self.upper))

    @property
    def center(self) -> Point:
        return tuple((lo + hi) / 2 for lo, hi in zip(self.lower, self.upper))

    def diameter_sq(self):
        return norm_sq(self.sides)

    def is_degenerate(self) -> bool:
        return any(s == 0 for s in self.sides)

    def corners(self):
        return [tuple(c) for c in itertools.product(*zip(self.lower, self.upper))]


@dataclass(frozen=True)
class Ball:
    center: Point
    radius: Real
    closed: bool = False

    def __post_init__(self):
        if self.radius < 0:
            raise ValueError("negative radius")

    @property
    def dim(self) -> int:
        return len(self.center)

    def diameter_sq(self):
        return 4 * self.radius * self.radius

    def is_degenerate(self) -> bool:
        return self.radius == 0


@dataclass(frozen=True)
class CellUnion:
    """Connected finite union of boxes, the union of their closures minus boundary."""

    boxes: tuple

    def __post_init__(self):
        if not self.boxes:
            raise ValueError("empty cell union")
        dims = {b.dim for b in self.boxes}
        if len(dims) != 1:
            raise ValueError("cells differ in dimension")
        if not _faces_connected(self.boxes):
            raise ValueError("cell union is not face-connected")

    @property
    def dim(self) -> int:
        return self.boxes[0].dim

    def diameter_sq(self):
        pts = [c for b in self.boxes for c in b.corners()]
        return max(norm_sq(sub(p, q)) for p, q in itertools.combinations(pts, 2)) if len(pts) > 1 else 0

    def is_degenerate(self) -> bool:
        return all(b.is_degenerate() for b in self.boxes)


Shape = Union[Box, Ball, CellUnion]


def _face_adjacent(a: Box, b: Box) -> bool:
    touching = 0
    for la, ua, lb, ub in zip(a.lower, a.upper, b.lower, b.upper):
        overlap = min(ua, ub) - max(la, lb)
        if overlap < 0:
            return False
        if overlap == 0:
            touching += 1
    return touching <= 1


def _faces_connected(boxes) -> bool:
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in range(len(boxes)):
            if j not in seen and _face_adjacent(boxes[i], boxes[j]):
                seen.add(j)
                stack.append(j)
    return len(seen) == len(boxes)


def diameter(shape: Shape) -> float:
    if isinstance(shape, Ball):
        return float(2 * shape.radius)
    return sqrt(shape.diameter_sq())


def bounding_box(shape: Shape) -> Box:
    if isinstance(shape, Box):
        return shape
    if isinstance(shape, Ball):
        r = shape.radius
        return Box(tuple(c - r for c in shape.center), tuple(c + r for c in shape.center))
    lows = [min(b.lower[i] for b in shape.boxes) for i in range(shape.dim)]
    highs = [max(b.upper[i] for b in shape.boxes) for i in range(shape.dim)]
    return Box(tuple(lows), tuple(highs))


def transform(shape: Shape, lam, offset: Point) -> Shape:
    """Image under x -> lam * x + offset."""
    if isinstance(shape, Box):
        return Box(add(scale(shape.lower, lam), offset), add(scale(shape.upper, lam), offset))
    if isinstance(shape, Ball):
        return Ball(add(scale(shape.center, lam), offset), lam * shape.radius, shape.closed)
    return CellUnion(tuple(transform(b, lam, offset) for b in shape.boxes))


# ---------------------------------------------------------------------------
# distances


def box_box_distance_sq(a: Box, b: Box):
    total = 0
    for la, ua, lb, ub in zip(a.lower, a.upper, b.lower, b.upper):
        gap = max(lb - ua, la - ub, 0)
        total += gap * gap
    return total


def point_box_distance_sq(p: Point, b: Box):
    total = 0
    for x, lo, hi in zip(p, b.lower, b.upper):
        gap = max(lo - x, x - hi, 0)
        total += gap * gap
    return total


def point_distance_to(shape: Shape, p: Point) -> float:
    """Distance from ``p`` to the closure of ``shape``."""
    if isinstance(shape, Box):
        return sqrt(point_box_distance_sq(p, shape))
    if isinstance(shape, Ball):
        return max(0.0, point_distance(p, shape.center) - float(shape.radius))
    return min(point_distance_to(b, p) for b in shape.boxes)


def distance(a: Shape, b: Shape) -> float:
    """Infimum of Euclidean distances between the two sets."""
    if isinstance(a, CellUnion):
        return min(distance(x, b) for x in a.boxes)
    if isinstance(b, CellUnion):
        return min(distance(a, x) for x in b.boxes)
    if isinstance(a, Box) and isinstance(b, Box):
        return sqrt(box_box_distance_sq(a, b))
    if isinstance(a, Ball) and isinstance(b, Ball):
        return max(0.0, point_distance(a.center, b.center) - float(a.radius) - float(b.radius))
    box, ball = (a, b) if isinstance(a, Box) else (b, a)
    return max(0.0, sqrt(point_box_distance_sq(ball.center, box)) - float(ball.radius))


def distance_to_complement(shape: Shape, hull: Shape) -> float:
    """Distance from ``shape`` (inside ``hull``) to the complement of ``hull``.

    Zero when the shape is not contained in the hull.
    """
    if isinstance(shape, CellUnion):
        return min(distance_to_complement(b, hull) for b in shape.boxes)
    if isinstance(hull, Box):
        if isinstance(shape, Box):
            gaps = [min(lo - hlo, hhi - hi) for lo, hi, hlo, hhi in
                    zip(shape.lower, shape.upper, hull.lower, hull.upper)]
        else:
            r = shape.radius
            gaps = [min(c - r - hlo, hhi - c - r) for c, hlo, hhi in
                    zip(shape.center, hull.lower, hull.upper)]
        return float(max(min(gaps), 0))
    if isinstance(hull, Ball):
        if isinstance(shape, Box):
            far = max(norm_sq(sub(c, hull.center)) for c in shape.corners())
            return max(0.0, float(hull.radius) - sqrt(far))
        return max(0.0, float(hull.radius) - point_distance(shape.center, hull.center) - float(shape.radius))
    raise TypeError(f"unsupported hull {type(hull).__name__}")


# ---------------------------------------------------------------------------
# incidence predicates (gaps are open; hulls and Bob's balls closed)


def contains_point(shape: Shape, p: Point, closed: bool = False) -> bool:
    if isinstance(shape, Box):
        if closed:
            return all(lo <= x <= hi for x, lo, hi in zip(p, shape.lower, shape.upper))
        return all(lo < x < hi for x, lo, hi in zip(p, shape.lower, shape.upper))
    if isinstance(shape, Ball):
        d2 = norm_sq(sub(p, shape.center))
        r2 = shape.radius * shape.radius
        return d2 <= r2 if closed else d2 < r2
    if closed:
        return any(contains_point(b, p, True) for b in shape.boxes)
    # interior of a union of closed cells
    if any(contains_point(b, p) for b in shape.boxes):
        return True
    return _cell_union_interior(shape, p)


def _cell_union_interior(shape: CellUnion, p: Point) -> bool:
    touching = [b for b in shape.boxes if contains_point(b, p, closed=True)]
    if not touching:
        return False
    eps_dirs = itertools.product((-1, 1), repeat=shape.dim)
    # p interior iff each orthant around p is covered by some touching cell
    for signs in eps_dirs:
        covered = False
        for b in touching:
            if all((s < 0 and lo < x) or (s > 0 and x < hi)
                   for s, x, lo, hi in zip(signs, p, b.lower, b.upper)):
                covered = True
                break
        if not covered:
            return False
    return True


def intersects_open(a: Shape, b: Shape) -> bool:
    """Do two open sets meet?"""
    if isinstance(a, CellUnion) or isinstance(b, CellUnion):
        xs = a.boxes if isinstance(a, CellUnion) else (a,)
        ys = b.boxes if isinstance(b, CellUnion) else (b,)
        return any(intersects_open(x, y) for x in xs for y in ys)
    if a.is_degenerate() or b.is_degenerate():
        return False
    if isinstance(a, Box) and isinstance(b, Box):
        return all(max(la, lb) < min(ua, ub) for la, ua, lb, ub in zip(a.lower, a.upper, b.lower, b.upper))
    if isinstance(a, Ball) and isinstance(b, Ball):
        rs = a.radius + b.radius
        return norm_sq(sub(a.center, b.center)) < rs * rs
    box, ball = (a, b) if isinstance(a, Box) else (b, a)
    return point_box_distance_sq(ball.center, box) < ball.radius * ball.radius


def meets_ball(shape: Shape, ball: Ball) -> bool:
    """Does open ``shape`` meet the closed ball?"""
    if isinstance(shape, CellUnion):
        return any(meets_ball(b, ball) for b in shape.boxes)
    if shape.is_degenerate():
        return False
    r2 = ball.radius * ball.radius
    if ball.radius == 0:
        return contains_point(shape, ball.center)
    if isinstance(shape, Box):
        return point_box_distance_sq(ball.center, shape) < r2
    rs = shape.radius + ball.radius
    return norm_sq(sub(shape.center, ball.center)) < rs * rs


def closure_within_closed(a: Shape, b: Shape) -> bool:
    """Is the closure of ``a`` inside the closed set ``b`` (Box or Ball)?"""
    if isinstance(a, CellUnion):
        return all(closure_within_closed(x, b) for x in a.boxes)
    if isinstance(b, Box):
        ab = bounding_box(a)
        return all(hlo <= lo and hi <= hhi for lo, hi, hlo, hhi in zip(ab.lower, ab.upper, b.lower, b.upper))
    if isinstance(b, Ball):
        if isinstance(a, Box):
            r2 = b.radius * b.radius
            return all(norm_sq(sub(c, b.center)) <= r2 for c in a.corners())
        gap = b.radius - a.radius
        return gap >= 0 and norm_sq(sub(a.center, b.center)) <= gap * gap
    raise TypeError(f"unsupported container {type(b).__name__}")


def closure_within_open(a: Shape, b: Shape) -> bool:
    """Is the closure of ``a`` inside the open convex set ``b``?"""
    if isinstance(a, CellUnion):
        return all(closure_within_open(x, b) for x in a.boxes)
    if isinstance(b, Box):
        ab = bounding_box(a)
        return all(hlo < lo and hi < hhi for lo, hi, hlo, hhi in zip(ab.lower, ab.upper, b.lower, b.upper))
    if isinstance(b, Ball):
        if isinstance(a, Box):
            r2 = b.radius * b.radius
            return all(norm_sq(sub(c, b.center)) < r2 for c in a.corners())
        gap = b.radius - a.radius
        return gap > 0 and norm_sq(sub(a.center, b.center)) < gap * gap
    raise TypeError(f"unsupported container {type(b).__name__}")


def closures_disjoint(a: Shape, b: Shape) -> bool:
    if isinstance(a, Box) and isinstance(b, Box):
        return box_box_distance_sq(a, b) > 0
    return distance(a, b) > 0


def boundary_candidates(shape: Shape, away_from: Point | None = None) -> list:
    """Deterministic boundary points: corners of boxes, axis poles of balls.

    For balls, the point farthest from ``away_from`` is appended.
    """
    if isinstance(shape, Box):
        return shape.corners()
    if isinstance(shape, CellUnion):
        return [c for b in shape.boxes for c in b.corners()]
    pts = []
    for i in range(shape.dim):
        for s in (-1, 1):
            p = list(shape.center)
            p[i] = p[i] + s * shape.radius
            pts.append(tuple(p))
    if away_from is not None:
        v = sub(shape.center, away_from)
        n = sqrt(norm_sq(v))
        if n > 0:
            pts.append(tuple(float(c) + float(shape.radius) * float(x) / n for c, x in zip(shape.center, v)))
    return pts


def segment_exit(shape: Shape, p: Point, q: Point) -> Point:
    """First boundary point of ``shape`` on the segment from ``p`` (in the closure) to ``q`` (outside)."""
    if isinstance(shape, Box):
        t_exit = 1
        for x, y, lo, hi in zip(p, q, shape.lower, shape.upper):
            if y > hi and y != x:
                t_exit = min(t_exit, (hi - x) / (y - x))
            elif y < lo and y != x:
                t_exit = min(t_exit, (lo - x) / (y - x))
        return tuple(x + t_exit * (y - x) for x, y in zip(p, q))
    if isinstance(shape, Ball):
        # |p + t(q-p) - c|^2 = r^2, largest root in [0, 1]
        d = [float(y - x) for x, y in zip(p, q)]
        f = [float(x - c) for x, c in zip(p, shape.center)]
        a = sum(x * x for x in d)
        b = 2 * sum(x * y for x, y in zip(d, f))
        c = sum(x * x for x in f) - float(shape.radius) ** 2
        disc = max(b * b - 4 * a * c, 0.0)
        t = (-b + math.sqrt(disc)) / (2 * a)
        t = min(max(t, 0.0), 1.0)
        return tuple(float(x) + t * y for x, y in zip(p, d))
    raise TypeError("segment_exit needs a convex shape")


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(x)
