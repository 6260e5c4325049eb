"""Exact rational planar primitives and predicates.

Every coordinate in this package is a ``fractions.Fraction`` and every
predicate here is decided with integer-exact arithmetic: orientation signs,
squared distances, squared radii.  No square root is ever taken on the
certificate path; where a length scale is needed for *choices* (spacing,
radius budgets) we use the explicit one-sided approximations
:func:`sqrt_under` / :func:`sqrt_over`, which are still exact rationals with
a proven side.

All types are immutable values and all operations are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Iterable, NamedTuple, Optional, Sequence

from .errors import DepthExceeded

Rat = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(value, den=None) -> Fraction:
    """Build an exact rational from ints, strings like ``"3/4"``, or pairs."""
    if den is not None:
        return Fraction(value, den)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"cannot build exact rational from {value!r}")


class Point(NamedTuple):
    x: Fraction
    y: Fraction

    def __add__(self, other: "Point") -> "Point":  # type: ignore[override]
        return Point(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Point") -> "Point":
        return Point(self.x - other.x, self.y - other.y)

    def scale(self, k: Fraction) -> "Point":
        return Point(self.x * k, self.y * k)

    def dot(self, other: "Point") -> Fraction:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Point") -> Fraction:
        return self.x * other.y - self.y * other.x

    def dist2(self, other: "Point") -> Fraction:
        dx = self.x - other.x
        dy = self.y - other.y
        return dx * dx + dy * dy

    def norm2(self) -> Fraction:
        return self.x * self.x + self.y * self.y


ORIGIN = Point(ZERO, ZERO)


def pt(x, y) -> Point:
    return Point(rat(x), rat(y))


class Segment(NamedTuple):
    a: Point
    b: Point

    def midpoint(self) -> Point:
        return Point((self.a.x + self.b.x) / 2, (self.a.y + self.b.y) / 2)

    def length2(self) -> Fraction:
        return self.a.dist2(self.b)


class Disk(NamedTuple):
    center: Point
    radius: Fraction  # > 0; disks are open, closure handled by predicate choice


@dataclass(frozen=True)
class Polyline:
    """An ordered vertex chain.  Simplicity is a certified property, not an
    invariant of the type."""

    vertices: tuple[Point, ...]

    def __post_init__(self):
        if len(self.vertices) < 2:
            raise ValueError("polyline needs at least 2 vertices")
        for p, q in zip(self.vertices, self.vertices[1:]):
            if p == q:
                raise ValueError("consecutive polyline vertices must be distinct")

    def segments(self) -> tuple[Segment, ...]:
        vs = self.vertices
        return tuple(Segment(vs[i], vs[i + 1]) for i in range(len(vs) - 1))

    def bbox(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)


def polyline(points: Iterable) -> Polyline:
    return Polyline(tuple(Point(rat(x), rat(y)) for x, y in points))


@dataclass(frozen=True)
class ParamArc:
    """A polyline together with a strictly increasing parameter per vertex.

    Evaluation is piecewise-linear in the parameter, exactly.
    """

    points: tuple[Point, ...]
    params: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.points) != len(self.params):
            raise ValueError("points/params length mismatch")
        for a, b in zip(self.params, self.params[1:]):
            if a >= b:
                raise ValueError("params must be strictly increasing")

    def polyline(self) -> Polyline:
        return Polyline(self.points)

    def eval(self, t: Fraction) -> Point:
        ps = self.params
        if t < ps[0] or t > ps[-1]:
            raise ValueError(f"parameter {t} outside [{ps[0]}, {ps[-1]}]")
        from bisect import bisect_right
        i = bisect_right(ps, t) - 1
        if i >= len(ps) - 1:
            i = len(ps) - 2
        t0, t1 = ps[i], ps[i + 1]
        w = (t - t0) / (t1 - t0)
        a, b = self.points[i], self.points[i + 1]
        return a + (b - a).scale(w)


# ---------------------------------------------------------------------------
# one-sided square roots (for budgets, never for predicates)

def sqrt_under(x: Fraction, bits: int = 24) -> Fraction:
    """A rational u with u <= sqrt(x) and relative error < 2**-bits (x > 0)."""
    if x < 0:
        raise ValueError("sqrt of negative rational")
    if x == 0:
        return ZERO
    n, d = x.numerator, x.denominator
    m = n * d
    k = max(0, bits - m.bit_length() // 2 + 1)
    r = isqrt(m << (2 * k))
    return Fraction(r, d << k)


def sqrt_over(x: Fraction, bits: int = 24) -> Fraction:
    """A rational v with v >= sqrt(x) and relative error < 2**-bits."""
    if x < 0:
        raise ValueError("sqrt of negative rational")
    if x == 0:
        return ZERO
    n, d = x.numerator, x.denominator
    m = n * d
    k = max(0, bits - m.bit_length() // 2 + 1)
    r = isqrt(m << (2 * k))
    if r * r < (m << (2 * k)):
        r += 1
    return Fraction(r, d << k)


# ---------------------------------------------------------------------------
# orientation and segment intersection

def orient(a: Point, b: Point, c: Point) -> int:
    """Sign of the signed area of (a, b, c): +1 left turn, -1 right, 0 collinear."""
    v = (b - a).cross(c - a)
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


class SegIntersection(NamedTuple):
    kind: str  # "disjoint" | "touch" | "overlap"
    point: Optional[Point]  # the single common point when kind == "touch"


_DISJOINT = SegIntersection("disjoint", None)


def _on_segment_collinear(p: Point, s: Segment) -> bool:
    # assumes p collinear with s
    return (min(s.a.x, s.b.x) <= p.x <= max(s.a.x, s.b.x)
            and min(s.a.y, s.b.y) <= p.y <= max(s.a.y, s.b.y))


def seg_intersect(s1: Segment, s2: Segment) -> SegIntersection:
    """Exact classification of the intersection of two closed segments.

    ``touch`` is returned only when the intersection is a single point
    (proper crossing or endpoint contact); ``overlap`` when it is a
    subsegment of positive length.
    """
    o1 = orient(s1.a, s1.b, s2.a)
    o2 = orient(s1.a, s1.b, s2.b)
    o3 = orient(s2.a, s2.b, s1.a)
    o4 = orient(s2.a, s2.b, s1.b)

    if o1 == 0 and o2 == 0 and o3 == 0 and o4 == 0:
        # all collinear: compare parameter intervals on the dominant axis
        d = s1.b - s1.a
        if abs(d.x) >= abs(d.y):
            key = lambda p: p.x  # noqa: E731
        else:
            key = lambda p: p.y  # noqa: E731
        a1, b1 = sorted((key(s1.a), key(s1.b)))
        a2, b2 = sorted((key(s2.a), key(s2.b)))
        lo, hi = max(a1, a2), min(b1, b2)
        if lo > hi:
            return _DISJOINT
        if lo == hi:
            # single shared point; recover it from whichever endpoint matches
            for p in (s1.a, s1.b, s2.a, s2.b):
                if key(p) == lo and _on_segment_collinear(p, s1) and _on_segment_collinear(p, s2):
                    return SegIntersection("touch", p)
            return _DISJOINT  # pragma: no cover - unreachable
        return SegIntersection("overlap", None)

    if o1 != o2 and o3 != o4:
        # at most one common point; if any orientation is zero the contact is
        # an endpoint lying on the other segment
        if o1 == 0:
            return SegIntersection("touch", s2.a)
        if o2 == 0:
            return SegIntersection("touch", s2.b)
        if o3 == 0:
            return SegIntersection("touch", s1.a)
        if o4 == 0:
            return SegIntersection("touch", s1.b)
        # proper crossing: exact rational intersection point
        d1 = s1.b - s1.a
        d2 = s2.b - s2.a
        denom = d1.cross(d2)
        t = (s2.a - s1.a).cross(d2) / denom
        return SegIntersection("touch", s1.a + d1.scale(t))

    # collinear contact of an endpoint without straddling
    if o1 == 0 and _on_segment_collinear(s2.a, s1):
        return SegIntersection("touch", s2.a)
    if o2 == 0 and _on_segment_collinear(s2.b, s1):
        return SegIntersection("touch", s2.b)
    if o3 == 0 and _on_segment_collinear(s1.a, s2):
        return SegIntersection("touch", s1.a)
    if o4 == 0 and _on_segment_collinear(s1.b, s2):
        return SegIntersection("touch", s1.b)
    return _DISJOINT


# ---------------------------------------------------------------------------
# point/segment/disk metrics (all squared)

def point_seg_dist2(p: Point, s: Segment) -> Fraction:
    d = s.b - s.a
    L2 = d.norm2()
    t = (p - s.a).dot(d)
    if t <= 0:
        return p.dist2(s.a)
    if t >= L2:
        return p.dist2(s.b)
    # foot of perpendicular at parameter t/L2, exact
    foot = s.a + d.scale(t / L2)
    return p.dist2(foot)


def seg_seg_dist2(s1: Segment, s2: Segment) -> Fraction:
    if seg_intersect(s1, s2).kind != "disjoint":
        return ZERO
    return min(
        point_seg_dist2(s1.a, s2),
        point_seg_dist2(s1.b, s2),
        point_seg_dist2(s2.a, s1),
        point_seg_dist2(s2.b, s1),
    )


def point_in_disk(p: Point, d: Disk, closed: bool = False) -> bool:
    dd = p.dist2(d.center)
    rr = d.radius * d.radius
    return dd <= rr if closed else dd < rr


def seg_in_disk(s: Segment, d: Disk) -> bool:
    # open disks are convex: endpoint membership decides the whole segment,
    # since the distance to the center is maximized at an endpoint
    return point_in_disk(s.a, d) and point_in_disk(s.b, d)


def seg_avoids_disk(s: Segment, d: Disk, allow_touch_at: Sequence[Point] = ()) -> bool:
    """True iff the closed segment avoids the open disk.

    Touching the boundary circle is allowed; ``allow_touch_at`` lists points
    permitted to lie exactly on the circle (certificate bookkeeping only --
    the predicate itself is the same either way since the disk is open).
    """
    return point_seg_dist2(d.center, s) >= d.radius * d.radius


def disks_overlap(d1: Disk, d2: Disk, mode: str = "open-open") -> bool:
    """Exact disk relations on squared quantities.

    ``open-open``: the open disks intersect.
    ``closed-in-open``: the closure of d1 sits inside the open d2.
    """
    cc = d1.center.dist2(d2.center)
    if mode == "open-open":
        s = d1.radius + d2.radius
        return cc < s * s
    if mode == "closed-in-open":
        if d1.radius >= d2.radius:
            return False
        t = d2.radius - d1.radius
        return cc < t * t
    raise ValueError(f"unknown disk overlap mode {mode!r}")


# ---------------------------------------------------------------------------
# polyline certificates

def polyline_is_simple(p: Polyline) -> tuple[bool, Optional[tuple[int, int]]]:
    """Exact simplicity check: non-adjacent segments must be disjoint and
    adjacent ones must meet exactly in their shared vertex.

    Returns (ok, witness segment index pair).
    """
    segs = p.segments()
    n = len(segs)
    for i in range(n):
        for j in range(i + 1, n):
            res = seg_intersect(segs[i], segs[j])
            if j == i + 1:
                if res.kind != "touch" or res.point != segs[i].b:
                    return False, (i, j)
            else:
                closing = (i == 0 and j == n - 1
                           and p.vertices[0] == p.vertices[-1])
                if closing:
                    continue  # closed polylines share their seam vertex
                if res.kind != "disjoint":
                    return False, (i, j)
    return True, None


def polyline_clearance2(p: Polyline) -> Fraction:
    """Min squared distance between non-adjacent segments (0 = self-touch)."""
    segs = p.segments()
    n = len(segs)
    best: Optional[Fraction] = None
    for i in range(n):
        for j in range(i + 2, n):
            d2 = seg_seg_dist2(segs[i], segs[j])
            if best is None or d2 < best:
                best = d2
                if best == 0:
                    return ZERO
    return best if best is not None else Fraction(4)  # single segment: no constraint


# ---------------------------------------------------------------------------
# membership of a polyline in a union of open disks

class CoverageResult(NamedTuple):
    ok: bool
    pieces: tuple[tuple[Point, Point, int], ...]  # witness subdivision (a, b, disk index)
    witness: Optional[Point]  # a point outside the union when not ok


def _seg_pieces(a: Point, b: Point, disks: Sequence[Disk],
                candidates: Sequence[int], depth: int,
                out: list) -> Optional[Point]:
    for idx in candidates:
        d = disks[idx]
        if point_in_disk(a, d) and point_in_disk(b, d):
            out.append((a, b, idx))
            return None
    if depth <= 0:
        raise DepthExceeded("segment piece graze: bisection depth exhausted")
    m = Segment(a, b).midpoint()
    if not any(point_in_disk(m, disks[i]) for i in candidates):
        if not any(point_in_disk(m, d) for d in disks):
            return m
    # keep only candidates that can still matter for each half
    err = _seg_pieces(a, m, disks,
                      [i for i in candidates
                       if point_seg_dist2(disks[i].center, Segment(a, m))
                       < disks[i].radius * disks[i].radius],
                      depth - 1, out)
    if err is not None:
        return err
    return _seg_pieces(m, b, disks,
                       [i for i in candidates
                        if point_seg_dist2(disks[i].center, Segment(m, b))
                        < disks[i].radius * disks[i].radius],
                       depth - 1, out)


def polyline_in_disk_union(p: Polyline, disks: Sequence[Disk],
                           max_depth: int = 64) -> CoverageResult:
    """Decide whether every point of ``p`` lies in the union of open disks.

    The decision subdivides each segment until a piece fits in a single open
    disk (convexity makes the endpoint test exact).  A graze of the union
    boundary raises :class:`DepthExceeded` rather than answer wrongly.
    """
    if not disks:
        raise ValueError("empty disk list")
    pieces: list[tuple[Point, Point, int]] = []
    for seg in p.segments():
        cand = [i for i, d in enumerate(disks)
                if point_seg_dist2(d.center, seg) < d.radius * d.radius]
        if not cand:
            return CoverageResult(False, (), seg.a)
        witness = _seg_pieces(seg.a, seg.b, disks, cand, max_depth, pieces)
        if witness is not None:
            return CoverageResult(False, (), witness)
    return CoverageResult(True, tuple(pieces), None)


# ---------------------------------------------------------------------------
# coarse spatial index (pruning only; keys are exact integer cells)

class GridIndex:
    """Buckets points by exact integer cell so that pair scans stay local.

    Cell width is a positive rational; floor division on exact fractions
    keeps the pruning conservative (never drops a candidate).
    """

    def __init__(self, cell: Fraction):
        if cell <= 0:
            raise ValueError("cell must be positive")
        self.cell = cell
        self._cells: dict[tuple[int, int], list[int]] = {}

    def _key(self, p: Point) -> tuple[int, int]:
        cx = (p.x.numerator * self.cell.denominator) // (p.x.denominator * self.cell.numerator)
        cy = (p.y.numerator * self.cell.denominator) // (p.y.denominator * self.cell.numerator)
        return (cx, cy)

    def add(self, p: Point, payload: int) -> None:
        self._cells.setdefault(self._key(p), []).append(payload)

    def near(self, p: Point, reach_cells: int = 1) -> list[int]:
        kx, ky = self._key(p)
        found: list[int] = []
        for dx in range(-reach_cells, reach_cells + 1):
            for dy in range(-reach_cells, reach_cells + 1):
                found.extend(self._cells.get((kx + dx, ky + dy), ()))
        return found
