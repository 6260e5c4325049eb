"""Finite stage towers: iterated half-plane embeddings with nested chains.

Stage n+1 is produced from stage n by reading the bonding map's tuck
through stage n's arc: each tuck point (u, v) becomes the stage-n point at
parameter v pushed off the arc by u along a rational approximate normal
field (per-segment normals, mitered at vertices).  The offset never exceeds
a quarter of the stage arc's clearance, so distinct strands stay separate;
every stage is then certified exactly (simplicity, half-plane interior,
closeness to the pulled-back previous stage, containment in the previous
cover, chain refinement, unique origin link) and failures shrink the
offsets and retry.

The infinite limit is out of scope: the tower records exactly the per-stage
data a convergence argument needs (summable closeness schedule, nested
covers with vanishing mesh, stable origin).
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .certs import Certificate, Check
from .chains import (DiskChain, RefinementWitness, cover_polyline,
                     validate_chain, validate_refinement)
from .errors import MarginTooSmall, ValidationFailed
from .geom import (ORIGIN, ZERO, Disk, ParamArc, Point, Polyline,
                   polyline_clearance2, polyline_in_disk_union,
                   polyline_is_simple, rat, sqrt_over, sqrt_under)
from .pl_maps import InverseSystemSpec, PLMap, evaluate, preimages
from .tuck import TuckArc, tuck_embed


@dataclass(frozen=True)
class Stage:
    omega: ParamArc
    chain: DiskChain


@dataclass(frozen=True)
class StageTower:
    stages: tuple[Stage, ...]
    eps_schedule: tuple[Fraction, ...]   # closeness bound for each step n -> n+1
    mesh_schedule: tuple[Fraction, ...]
    system: InverseSystemSpec
    certificates: tuple[Certificate, ...]
    refinements: tuple[RefinementWitness, ...]

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.certificates)


# ---------------------------------------------------------------------------
# offset machinery

def _piecewise_eval(params, values, t: Fraction) -> Fraction:
    i = bisect_right(params, t) - 1
    if i >= len(params) - 1:
        i = len(params) - 2
    t0, t1 = params[i], params[i + 1]
    return values[i] + (values[i + 1] - values[i]) * (t - t0) / (t1 - t0)


def _piecewise_preimages(params, values, y: Fraction) -> list[Fraction]:
    out: set[Fraction] = set()
    for i in range(len(params) - 1):
        y0, y1 = values[i], values[i + 1]
        lo, hi = (y0, y1) if y0 <= y1 else (y1, y0)
        if y < lo or y > hi:
            continue
        if y0 == y1:
            out.add(params[i])
            out.add(params[i + 1])
        else:
            out.add(params[i] + (y - y0) * (params[i + 1] - params[i]) / (y1 - y0))
    return sorted(out)


class _OffsetFrame:
    """Rational approximate unit normals per segment, mitered at vertices,
    with the offset side fixed so that the frame points into the half-plane
    at the origin attachment."""

    def __init__(self, arc: ParamArc):
        self.arc = arc
        pts, ps = arc.points, arc.params
        raw = []
        for a, b in zip(pts, pts[1:]):
            d = b - a
            inv = 1 / sqrt_over(d.norm2(), 16)
            raw.append(Point(-d.y * inv, d.x * inv))
        # fix the side: at the segment leaving parameter 0 the normal must
        # point off the boundary axis (positive x)
        i0 = ps.index(ZERO) if ZERO in ps else 0
        seg = min(i0, len(raw) - 1)
        sign = 1 if raw[seg].x > 0 else -1
        self.normals = [n.scale(Fraction(sign)) for n in raw]
        self.miters: list[Optional[Point]] = [None] * len(pts)
        for i in range(1, len(pts) - 1):
            n1, n2 = self.normals[i - 1], self.normals[i]
            denom = 1 + n1.dot(n2)
            if denom <= Fraction(1, 8):
                raise ValidationFailed("offset frame: corner too sharp to miter")
            self.miters[i] = (n1 + n2).scale(1 / denom)

    def offset(self, q: Fraction, u: Fraction) -> Point:
        ps = self.arc.params
        base = self.arc.eval(q)
        if q in ps:
            i = ps.index(q)
            n = self.miters[i]
            if n is None:  # arc endpoint: use the single incident normal
                n = self.normals[0] if i == 0 else self.normals[-1]
        else:
            i = bisect_right(ps, q) - 1
            n = self.normals[min(i, len(self.normals) - 1)]
        return base + n.scale(u)


def _containment_margin(omega: ParamArc, chain: DiskChain) -> Fraction:
    """A positive depth bound for the arc inside its own cover union.

    If the arc is still covered when every radius is scaled by s < 1, each
    arc point sits at depth >= (1-s) * r of its witness disk; the bound is
    uniform over the witnessed links.
    """
    from .errors import DepthExceeded
    for num, den in ((7, 8), (15, 16), (63, 64)):
        s = Fraction(num, den)
        shrunk = [Disk(d.center, d.radius * s) for d in chain.links]
        try:
            res = polyline_in_disk_union(omega.polyline(), shrunk, max_depth=40)
        except DepthExceeded:
            continue
        if res.ok:
            used = {idx for _, _, idx in res.pieces}
            return (1 - s) * min(chain.links[i].radius for i in used)
    raise MarginTooSmall("cover has no certified interior slack around the arc")


def _lipschitz_over(omega: ParamArc) -> Fraction:
    worst = ZERO
    for i in range(len(omega.points) - 1):
        d2 = omega.points[i].dist2(omega.points[i + 1])
        dp = omega.params[i + 1] - omega.params[i]
        ratio = d2 / (dp * dp)
        if ratio > worst:
            worst = ratio
    return sqrt_over(worst, 16)


# ---------------------------------------------------------------------------
# stage operations

def initial_stage(eps, mesh=Fraction(1, 2)) -> tuple[ParamArc, DiskChain]:
    """The seed wedge (eps*|p|, p) with its anchored chain cover."""
    eps = rat(eps)
    if eps <= 0:
        raise ValueError("eps must be positive")
    omega = ParamArc(
        (Point(eps, Fraction(-1)), ORIGIN, Point(eps, Fraction(1))),
        (Fraction(-1), ZERO, Fraction(1)),
    )
    chain = cover_polyline(omega.polyline(), rat(mesh), origin=ORIGIN)
    return omega, chain


def _stage_certificate(subject: str, omega_next: ParamArc, chain_next: DiskChain,
                       omega: ParamArc, chain: DiskChain, f: PLMap,
                       eps_n: Fraction, mesh_next: Fraction) -> tuple[Certificate, RefinementWitness]:
    checks: list[Check] = []

    simple, wit = polyline_is_simple(omega_next.polyline())
    checks.append(Check("simple", simple, "" if simple else f"segments {wit}"))

    ps, pts = omega_next.params, omega_next.points
    ok0 = ZERO in ps and pts[ps.index(ZERO)] == ORIGIN
    checks.append(Check("origin-vertex", ok0))
    bad = [i for i, (p, q) in enumerate(zip(ps, pts)) if p != 0 and q.x <= 0]
    checks.append(Check("half-plane-interior", not bad,
                        "" if not bad else f"vertex {bad[0]} at x<=0"))

    e2 = eps_n * eps_n
    worst = None
    for p, q in zip(ps, pts):
        target = omega.eval(evaluate(f, p))
        if q.dist2(target) >= e2:
            worst = p
            break
    checks.append(Check("closeness", worst is None,
                        "" if worst is None else f"deviation >= eps at parameter {worst}"))

    cov = polyline_in_disk_union(omega_next.polyline(), chain.links)
    checks.append(Check("inside-previous-cover", cov.ok,
                        "" if cov.ok else f"escapes near {cov.witness}"))

    ccert = validate_chain(chain_next)
    checks.append(Check("chain-valid", ccert.ok,
                        "" if ccert.ok else ccert.failures()[0].name))
    checks.append(Check("mesh-bound", chain_next.mesh_bound == mesh_next))

    try:
        witness = validate_refinement(chain_next, chain)
        checks.append(Check("refines-previous", True))
    except Exception as exc:  # NotARefinement
        witness = RefinementWitness(())
        checks.append(Check("refines-previous", False, str(exc)))

    return Certificate(subject, tuple(checks)), witness


def stage_step(omega: ParamArc, chain: DiskChain, f: PLMap, eps_n,
               mesh_next, max_retries: int = 4,
               subject: str = "stage-step") -> tuple[ParamArc, DiskChain, Certificate, RefinementWitness]:
    """One tower step: tuck f through the current stage.

    Raises MarginTooSmall when eps_n exceeds the cover's containment slack
    (halve and retry), ValidationFailed after retry exhaustion.
    """
    eps_n = rat(eps_n)
    margin = _containment_margin(omega, chain)
    if eps_n > margin:
        raise MarginTooSmall(f"eps {eps_n} exceeds containment margin {margin}")
    lip = max(_lipschitz_over(omega), Fraction(1))
    clear = sqrt_under(polyline_clearance2(omega.polyline()), 20)
    frame = _OffsetFrame(omega)

    for attempt in range(max_retries):
        shrink = 2 ** attempt
        band_cap = min(eps_n / 4, clear / 8, margin / 4) / shrink
        dev_cap = min(eps_n, margin) / (4 * lip * shrink)
        tuck = tuck_embed(f, eps_n, band_cap=band_cap, dev_cap=dev_cap)
        omega_next = _pull_back(tuck, frame, omega, f)

        def parent_depth(p: Point) -> Fraction:
            best = ZERO
            for d in chain.links:
                d2 = p.dist2(d.center)
                if d2 < d.radius * d.radius:
                    depth = (d.radius - sqrt_over(d2, 16)) / 2
                    if depth > best:
                        best = depth
            return best

        try:
            chain_next = cover_polyline(omega_next.polyline(), rat(mesh_next),
                                        origin=ORIGIN, radius_field=parent_depth)
        except (MarginTooSmall, ValidationFailed):
            continue
        cert, witness = _stage_certificate(subject, omega_next, chain_next,
                                           omega, chain, f, eps_n, rat(mesh_next))
        if cert.ok:
            return omega_next, chain_next, cert, witness
    raise ValidationFailed(f"stage step failed after {max_retries} attempts")


def _pull_back(tuck: TuckArc, frame: _OffsetFrame, omega: ParamArc,
               f: PLMap) -> ParamArc:
    """Vertices of the next stage: offset of the previous stage read through
    the tuck, on a parameter grid fine enough for exact certificates."""
    t_params = list(tuck.arc.params)
    t_u = [p.x for p in tuck.arc.points]
    t_v = [p.y for p in tuck.arc.points]

    grid: set[Fraction] = set(t_params)
    for q in omega.params:
        grid.update(preimages(f, q))
        grid.update(_piecewise_preimages(t_params, t_v, q))
    params = sorted(grid)

    pts = []
    for p in params:
        u = _piecewise_eval(t_params, t_u, p)
        v = _piecewise_eval(t_params, t_v, p)
        pts.append(frame.offset(v, u))
    return ParamArc(tuple(pts), tuple(params))


def run_tower(system: InverseSystemSpec, stages: int,
              mesh_schedule: Optional[list] = None) -> StageTower:
    """Build stages 1..N with chains, eps schedule and certificates.

    mesh_schedule must be positive, strictly decreasing, with the n-th
    entry below 1/n; the default is 1/(n+1).
    """
    if stages < 1:
        raise ValueError("need at least one stage")
    if stages > len(system.maps):
        raise ValueError("not enough bonding maps for the requested stages")
    if mesh_schedule is None:
        mesh_schedule = [Fraction(1, n + 1) for n in range(1, stages + 1)]
    mesh_schedule = [rat(m) for m in mesh_schedule]
    if len(mesh_schedule) < stages:
        raise ValueError("mesh schedule shorter than the stage count")
    for i, m in enumerate(mesh_schedule[:stages], start=1):
        if m <= 0:
            raise ValueError("mesh schedule must be positive")
        if m * i >= 1:
            raise ValueError(f"mesh_schedule[{i - 1}] must be < 1/{i}")
    for a, b in zip(mesh_schedule, mesh_schedule[1:stages]):
        if b >= a:
            raise ValueError("mesh schedule must be strictly decreasing")

    omega, chain = initial_stage(Fraction(1, 8), mesh_schedule[0])
    stage_list = [Stage(omega, chain)]
    certs: list[Certificate] = []
    refinements: list[RefinementWitness] = []
    eps_schedule: list[Fraction] = []

    c0 = validate_chain(chain)
    checks = list(c0.checks)
    cov = polyline_in_disk_union(omega.polyline(), chain.links)
    checks.append(Check("covers-arc", cov.ok))
    certs.append(Certificate("stage-1", tuple(checks)))

    eps_prev = Fraction(1, 4)
    for n in range(1, stages):
        f = system.maps[n - 1]
        margin = _containment_margin(omega, chain)
        eps_n = min(eps_prev / 2, Fraction(1, 2 ** (n + 2)), margin / 2)
        for _ in range(8):
            try:
                omega, chain, cert, witness = stage_step(
                    omega, chain, f, eps_n, mesh_schedule[n],
                    subject=f"stage-{n + 1}")
                break
            except MarginTooSmall:
                eps_n /= 2
        else:
            raise ValidationFailed(f"stage {n + 1}: margin never sufficed")
        stage_list.append(Stage(omega, chain))
        certs.append(cert)
        refinements.append(witness)
        eps_schedule.append(eps_n)
        eps_prev = eps_n

    # tower-level schedule certificate
    total = sum(eps_schedule, ZERO)
    sched_checks = [
        Check("eps-summable", not eps_schedule or total < 2 * eps_schedule[0],
              f"sum {total}"),
        Check("mesh-below-harmonic",
              all(mesh_schedule[i] * (i + 1) < 1 for i in range(stages))),
    ]
    certs.append(Certificate("tower-schedule", tuple(sched_checks)))

    return StageTower(tuple(stage_list), tuple(eps_schedule),
                      tuple(mesh_schedule[:stages]), system,
                      tuple(certs), tuple(refinements))
