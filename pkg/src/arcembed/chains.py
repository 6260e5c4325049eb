"""Round-disk chain covers of simple polylines.

A chain is an ordered list of open disks whose pairwise intersections obey
the corridor law (links i, j meet iff |i - j| <= 1), whose mesh (largest
diameter) is below a bound, and -- when anchored -- with a unique link
containing the origin.

Construction uses a conservative radius field: the global cap (mesh and a
quarter of the arc clearance) shrunk near each corner proportionally to the
corner's sine and the distance to it.  Disks are walked along each segment
by coverage intervals so that consecutive disks provably overlap while
skip-pairs provably separate; corner vertices carry their own pivot disks.
The output is never trusted: every chain is re-validated exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional, Sequence

from .certs import Certificate, Check
from .errors import (DegenerateArc, EntryNotInFirstLink, MarginTooSmall,
                     NotARefinement, RayTouchesArc, ValidationFailed)
from .geom import (ORIGIN, ZERO, Disk, Point, Polyline, Segment, disks_overlap,
                   point_in_disk, point_seg_dist2, polyline_clearance2,
                   polyline_in_disk_union, polyline_is_simple, rat,
                   seg_intersect, sqrt_over, sqrt_under)

RadiusField = Callable[[Point], Fraction]


@dataclass(frozen=True)
class DiskChain:
    links: tuple[Disk, ...]
    mesh_bound: Fraction
    origin_index: Optional[int] = None


@dataclass(frozen=True)
class RefinementWitness:
    child_to_parent: tuple[int, ...]


# ---------------------------------------------------------------------------
# validation

def validate_chain(chain: DiskChain) -> Certificate:
    """Exact re-check of all chain invariants (total; never raises)."""
    checks: list[Check] = []
    links = chain.links
    k = len(links)
    checks.append(Check("nonempty", k >= 1))
    bad_r = [i for i, d in enumerate(links) if d.radius <= 0]
    checks.append(Check("radii-positive", not bad_r))

    over = [i for i, d in enumerate(links) if 2 * d.radius >= chain.mesh_bound]
    checks.append(Check("mesh", not over,
                        "" if not over else f"link {over[0]} diameter >= bound"))

    # adjacency law with an exact interval sweep on x-extents
    missing = None
    for i in range(k - 1):
        if not disks_overlap(links[i], links[i + 1]):
            missing = i
            break
    checks.append(Check("adjacent-links-overlap", missing is None,
                        "" if missing is None else f"links {missing},{missing + 1} disjoint"))

    order = sorted(range(k), key=lambda i: links[i].center.x - links[i].radius)
    extra = None
    active: list[int] = []
    for idx in order:
        d = links[idx]
        lo = d.center.x - d.radius
        active = [j for j in active
                  if links[j].center.x + links[j].radius > lo]
        for j in active:
            if abs(idx - j) > 1 and disks_overlap(links[idx], links[j]):
                extra = (min(idx, j), max(idx, j))
                break
        if extra:
            break
        active.append(idx)
    checks.append(Check("distant-links-disjoint", extra is None,
                        "" if extra is None else f"links {extra[0]},{extra[1]} overlap"))

    if chain.origin_index is not None:
        holders = [i for i, d in enumerate(links) if point_in_disk(ORIGIN, d)]
        ok = holders == [chain.origin_index]
        checks.append(Check("origin-link-unique", ok,
                            f"origin in links {holders}, expected [{chain.origin_index}]"))
    return Certificate("chain", tuple(checks))


def validate_refinement(child: DiskChain, parent: DiskChain) -> RefinementWitness:
    """Map every child link to a parent link containing its closure."""
    mapping: list[int] = []
    for ci, c in enumerate(child.links):
        best = None
        for pi, p in enumerate(parent.links):
            if disks_overlap(c, p, "closed-in-open"):
                best = pi
                break
        if best is None:
            raise NotARefinement(ci)
        mapping.append(best)
    return RefinementWitness(tuple(mapping))


def point_depth_in_links(p: Point, links: Sequence[Disk]) -> Fraction:
    """Under-approximated max over links of (radius - distance); <= 0 outside."""
    best = None
    for d in links:
        dd = p.dist2(d.center)
        if dd >= d.radius * d.radius:
            continue
        depth = d.radius - sqrt_over(dd, 20)
        if best is None or depth > best:
            best = depth
    return best if best is not None else Fraction(-1)


# ---------------------------------------------------------------------------
# construction

def _dyadic_floor(x: Fraction, bits: int = 24) -> Fraction:
    return Fraction((x.numerator << bits) // x.denominator, 1 << bits)


class _Field:
    """Pointwise radius cap: global cap, sharpness cones at corners, an
    origin guard, and an optional caller-supplied field."""

    def __init__(self, arc: Polyline, cap: Fraction, origin: Optional[Point],
                 extra: Optional[RadiusField]):
        self.cap = cap
        self.extra = extra
        self.origin = origin
        vs = arc.vertices
        self.corners: list[tuple[int, Point, Fraction]] = []  # (index, vertex, cone factor)
        for i in range(1, len(vs) - 1):
            u = vs[i - 1] - vs[i]
            w = vs[i + 1] - vs[i]
            cr = u.cross(w)
            sin2 = cr * cr / (u.norm2() * w.norm2())
            if sin2 == 0:
                continue  # straight-through vertex, no cone
            if u.dot(w) <= 0:
                # right or obtuse corner: dist^2 >= d_i^2 + d_j^2 across the
                # branches, so a flat 1/2 factor separates skip-pairs
                factor = Fraction(1, 2)
            else:
                factor = min(Fraction(1, 2), sqrt_under(sin2, 12) / 4)
            self.corners.append((i, vs[i], factor))

    def at(self, p: Point, skip_corner: Optional[int] = None) -> Fraction:
        r = self.cap
        for idx, v, s4 in self.corners:
            if idx == skip_corner:
                continue
            d2 = p.dist2(v)
            if d2 == 0:
                return ZERO
            r = min(r, s4 * sqrt_under(d2, 12))
        if self.origin is not None and p != self.origin:
            r = min(r, Fraction(3, 8) * sqrt_under(p.dist2(self.origin), 12))
        if self.extra is not None:
            r = min(r, self.extra(p))
        return r


def _walk_segment(a: Point, b: Point, rho_a: Fraction, rho_b: Fraction,
                  field: _Field, step_num: int, step_den: int) -> Optional[list[Disk]]:
    """Disks strictly between the endpoint tips, coverage-contiguous.

    Returns None when the far-end handoff cannot be plugged at this step
    granularity (caller retries finer).
    """
    L2 = a.dist2(b)
    len_over = sqrt_over(L2, 20)
    len_under = sqrt_under(L2, 20)
    direction = b - a
    out: list[Disk] = []
    cov = rho_a / len_over  # certified covered prefix, in parameter units
    guard = len_under - rho_b  # centers must stay this far from b (scaled)
    step = Fraction(step_num, step_den)
    while True:
        # tentative radius at the next center; shrink to a fixed point of the field
        r = field.at(a + direction.scale(min(cov, Fraction(1)))) if cov < 1 else ZERO
        placed = False
        for _ in range(24):
            if r <= 0:
                break
            t = _dyadic_floor(cov + step * r / len_over)
            if t >= 1:
                break
            p = a + direction.scale(t)
            r_here = field.at(p)
            if r_here <= 0:
                raise MarginTooSmall("radius field vanished inside a segment")
            if r_here < r:
                r = r_here
                continue
            # far-end guard: keep skip-distance to the b-tip
            if t * len_over > guard - Fraction(9, 8) * r:
                break
            out.append(Disk(p, _dyadic_floor(r)))
            cov = t + out[-1].radius / len_over
            placed = True
            break
        if not placed:
            break
        if cov >= 1:
            return out
    # plug the far-end hole with one bridge disk inside the b-tip's reach
    tip_start = 1 - Fraction(7, 8) * rho_b / len_over
    if cov >= tip_start:
        return out
    mid = _dyadic_floor((cov + tip_start) / 2)
    p = a + direction.scale(mid)
    r = _dyadic_floor(field.at(p))
    if r <= 0:
        raise MarginTooSmall("radius field vanished at a segment handoff")
    if mid - r / len_over < cov and mid + r / len_over > tip_start:
        out.append(Disk(p, r))
        return out
    return None  # hole too wide at this granularity


def cover_polyline(arc: Polyline, epsilon, origin: Optional[Point] = None,
                   radius_field: Optional[RadiusField] = None,
                   max_attempts: int = 5) -> DiskChain:
    """Cover a simple polyline by a chain of round disks with mesh < epsilon.

    Radii never exceed a quarter of the arc clearance (exact squared minimum
    over non-adjacent segments, under-rooted), so separated limbs of the arc
    get disjoint links.  Smaller epsilon only ever grows the link count.
    """
    epsilon = rat(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    simple, witness = polyline_is_simple(arc)
    if not simple:
        raise DegenerateArc(f"arc is not simple near segments {witness}")
    clear2 = polyline_clearance2(arc)
    if clear2 == 0:
        raise DegenerateArc("arc self-touches: zero clearance")
    if origin is not None and origin not in arc.vertices:
        raise ValueError("origin must be a vertex of the arc")

    base_cap = min(Fraction(7, 16) * epsilon, sqrt_under(clear2, 20) / 4)
    for attempt in range(max_attempts):
        cap = base_cap / (2 ** attempt)
        field = _Field(arc, cap, origin, radius_field)
        chain = _build_cover(arc, field, epsilon, origin)
        if chain is None:
            continue
        if (validate_chain(chain).ok
                and polyline_in_disk_union(arc, chain.links).ok):
            return chain
    raise ValidationFailed("cover construction exhausted its retries")


def _build_cover(arc: Polyline, field: _Field, epsilon: Fraction,
                 origin: Optional[Point]) -> Optional[DiskChain]:
    vs = arc.vertices
    corner_ids = {idx for idx, _, _ in field.corners}
    tips: list[Disk] = []
    for i, v in enumerate(vs):
        skip = i if i in corner_ids else None
        r = field.at(v, skip_corner=skip)
        # a tip never reaches past 3/8 of either adjacent segment
        for j in (i - 1, i):
            if 0 <= j < len(vs) - 1:
                r = min(r, Fraction(3, 8) * sqrt_under(vs[j].dist2(vs[j + 1]), 16))
        if r <= 0:
            raise MarginTooSmall("radius field vanished at a vertex")
        tips.append(Disk(v, _dyadic_floor(r)))

    links: list[Disk] = []
    origin_index: Optional[int] = None
    for i in range(len(vs) - 1):
        tip = tips[i]
        if origin is not None and vs[i] == origin:
            origin_index = len(links)
        links.append(tip)
        for num, den in ((3, 8), (1, 8), (1, 32)):
            mid = _walk_segment(vs[i], vs[i + 1], tips[i].radius,
                                tips[i + 1].radius, field, num, den)
            if mid is not None:
                break
        else:
            return None
        links.extend(mid)
    if origin is not None and vs[-1] == origin:
        origin_index = len(links)
    links.append(tips[-1])
    return DiskChain(tuple(links), epsilon, origin_index)


# ---------------------------------------------------------------------------
# scene chain (ray prefix + existing cover, concatenated)

def _first_entry(ray: Polyline, links: Sequence[Disk]) -> tuple[int, int]:
    """(segment index, link index) of the ray's first entry into any open link."""
    for si, seg in enumerate(ray.segments()):
        hit = [li for li, d in enumerate(links)
               if point_seg_dist2(d.center, seg) < d.radius * d.radius]
        if hit:
            return si, min(hit)
    raise EntryNotInFirstLink("ray never enters the chain")


def chain_cover_scene(x_chain: DiskChain, ray: Polyline, epsilon,
                      arc: Optional[Polyline] = None) -> DiskChain:
    """One chain over ray-then-arc: cover the outside part of the ray, hand
    off into the first link through a single bridge disk, then reuse the
    existing cover.

    The ray must be disjoint from the arc and must first enter the chain
    through link 0; the portion after the entry must stay inside the union.
    """
    epsilon = rat(epsilon)
    links = x_chain.links
    if x_chain.mesh_bound > epsilon:
        raise ValueError("existing cover is coarser than the requested mesh")
    if arc is not None:
        for s1 in ray.segments():
            for s2 in arc.segments():
                if seg_intersect(s1, s2).kind != "disjoint":
                    raise RayTouchesArc(f"ray meets arc near {s1.a}")

    si, li = _first_entry(ray, links)
    if li != 0:
        raise EntryNotInFirstLink(f"first entry is into link {li}")
    if any(point_in_disk(ray.vertices[0], d) for d in links):
        raise EntryNotInFirstLink("ray starts already inside the chain")

    # handoff geometry on the entry segment: a stop point q just outside the
    # first link and a bridge center just inside, at a small common scale
    seg = ray.segments()[si]
    first = links[0]

    def at(t: Fraction) -> Point:
        return seg.a + (seg.b - seg.a).scale(t)

    def margin_outside(p: Point) -> Fraction:
        return sqrt_under(p.dist2(first.center), 20) - first.radius

    def depth_inside(p: Point) -> Fraction:
        return first.radius - sqrt_over(p.dist2(first.center), 20)

    scale = min(epsilon / 16, first.radius / 8, margin_outside(ray.vertices[si]) / 2)
    if scale <= 0:
        raise EntryNotInFirstLink("entry segment starts on the link boundary")

    grain = 4096
    t_in = None
    for k in range(1, grain + 1):
        if depth_inside(at(Fraction(k, grain))) >= scale / 2:
            t_in = Fraction(k, grain)
            break
    if t_in is None:
        raise EntryNotInFirstLink("entry segment never gets inside link 0")
    t_q = Fraction(0)
    k = 1
    while Fraction(k, grain) < t_in:
        if margin_outside(at(Fraction(k, grain))) >= scale / 2:
            t_q = Fraction(k, grain)
        k += 1
    q = at(t_q)
    bridge_center = at(t_in)
    jump = sqrt_over(q.dist2(bridge_center), 20)
    if jump > epsilon / 4:
        raise EntryNotInFirstLink("entry grazes the first link boundary")

    def clearance_field(p: Point) -> Fraction:
        r = Fraction(7, 16) * epsilon
        for d in links:
            gap2 = p.dist2(d.center)
            edge = sqrt_under(gap2, 16) - d.radius
            if edge <= 0:
                raise MarginTooSmall("prefix grazes the existing cover")
            r = min(r, Fraction(3, 8) * edge)
        if arc is not None:
            for s in arc.segments():
                r = min(r, Fraction(3, 8) * sqrt_under(point_seg_dist2(p, s), 16))
        return r

    prefix_vertices = ray.vertices[:si + 1]
    if q != prefix_vertices[-1]:
        prefix_vertices = prefix_vertices + (q,)
    if len(prefix_vertices) >= 2:
        pre_chain = cover_polyline(Polyline(prefix_vertices), epsilon,
                                   radius_field=clearance_field)
        pre_links = list(pre_chain.links)
    else:
        pre_links = [Disk(q, _dyadic_floor(clearance_field(q)))]

    # bridge: spans the jump from q into link 0, clear of all later links
    r_b = jump * Fraction(17, 16)
    for i, d in enumerate(links[1:], start=1):
        margin = sqrt_under(bridge_center.dist2(d.center), 16) - d.radius
        if margin <= 0:
            raise EntryNotInFirstLink(f"entry hugs link {i}")
        r_b = min(r_b, Fraction(3, 4) * margin)
    if r_b <= jump:
        raise EntryNotInFirstLink("no room to bridge into link 0")
    bridge = Disk(bridge_center, _dyadic_floor(r_b) + Fraction(1, 1 << 30))

    all_links = tuple(pre_links) + (bridge,) + links
    shift = len(pre_links) + 1
    oi = None if x_chain.origin_index is None else x_chain.origin_index + shift
    out = DiskChain(all_links, epsilon, oi)

    cert = validate_chain(out)
    if not cert.ok:
        raise ValidationFailed(f"scene chain invalid: {cert.failures()[0].name}")
    cover_targets = [ray] if arc is None else [ray, arc]
    for target in cover_targets:
        res = polyline_in_disk_union(target, all_links)
        if not res.ok:
            raise ValidationFailed(f"scene chain does not cover near {res.witness}")
    return out
