"""Boundary tuck embeddings: push the graph of a uniformly-oriented map
into the open half-plane, touching the axis only at the origin.

Construction outline
--------------------
Decompose [-1, 1] into maximal monotone laps.  Each lap becomes a vertical
*strand* drawn at a constant small x-band; consecutive strands are joined by
short horizontal *hooks* cut slightly below (above) each fold value, and the
parameter-0 attachment is a *wedge* dipping to the origin inside a window
|y| <= eta that is free of all other geometry.  The y-coordinate tracks
f exactly away from hooks and the wedge, so the deviation budget is spent
only on the x-offset and the cut depths.

Band assignment is the delicate part: a hook spanning two bands must not be
crossed by any third strand reaching the fold's level, and every strand
crossing level 0 must stay outside the origin wedge.  Each hook may either
undershoot its fold value (stopping short of strands that reach it) or
overshoot it (arching over strands whose runs *end* at that value -- free
ends in particular); the deviation budget allows both.  What remains are
pure ordering constraints on the bands; a backtracking search over band
orders and hook modes solves them (uniform departure orientation is what
makes them satisfiable).  The output is never trusted: an exact certificate
re-derives every invariant, and failures shrink scales and retry.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .certs import Certificate, Check
from .departures import assert_tuckable
from .errors import BandExhausted, NotZeroFixing
from .geom import ORIGIN, ZERO, ParamArc, Point, polyline_is_simple, rat
from .pl_maps import PLMap, evaluate, fixes_zero, laps, require_zero_fixing

FREE = "free"
FOLD = "fold"
AT_ORIGIN = "origin"


@dataclass(frozen=True)
class TuckArc:
    arc: ParamArc
    epsilon: Fraction


# ---------------------------------------------------------------------------
# structure extraction

@dataclass
class _Strand:
    idx: int
    plo: Fraction
    phi: Fraction
    rising: bool
    vlo: Fraction  # value range, sorted
    vhi: Fraction
    lo_end: tuple  # (FREE,) | (FOLD, fold_idx) | (AT_ORIGIN,)
    hi_end: tuple

    @property
    def top_end(self) -> tuple:
        return self.hi_end if self.rising else self.lo_end

    @property
    def bottom_end(self) -> tuple:
        return self.lo_end if self.rising else self.hi_end


@dataclass
class _Fold:
    idx: int
    left: int  # strand index; the fold joins strands left, left+1
    param: Fraction
    value: Fraction
    is_max: bool


def _structure(f: PLMap):
    """Strand/fold/origin decomposition of a zero-fixing map."""
    lap_list = laps(f)
    m = len(lap_list)
    folds: list[_Fold] = []
    boundary: list[tuple] = []  # descriptor between strand i and i+1
    origin = None
    for i in range(m - 1):
        p = lap_list[i][1]
        if p == 0:
            origin = (FOLD, i)
            boundary.append((AT_ORIGIN,))
        else:
            fold = _Fold(len(folds), i, p, evaluate(f, p), lap_list[i][2] == 1)
            folds.append(fold)
            boundary.append((FOLD, fold.idx))
    strands: list[_Strand] = []
    for i, (plo, phi, direction) in enumerate(lap_list):
        va, vb = evaluate(f, plo), evaluate(f, phi)
        lo_end = (FREE,) if i == 0 else boundary[i - 1]
        hi_end = (FREE,) if i == m - 1 else boundary[i]
        strands.append(_Strand(i, plo, phi, direction == 1,
                               min(va, vb), max(va, vb), lo_end, hi_end))
        if plo < 0 < phi:
            origin = ("interior", i)
    if origin is None:
        raise NotZeroFixing("no lap contains parameter 0")
    return strands, folds, origin


# ---------------------------------------------------------------------------
# band order constraints

def _origin_adjacent(origin) -> list[int]:
    if origin[0] == "interior":
        return [origin[1]]
    return [origin[1], origin[1] + 1]


# Levels close to a shared critical value are compared symbolically as
# (value, tier): an undershoot cut of fold k sits at value - delta_k
# (tier -1-sigma_k, larger deltas deeper), a free end exactly at the value
# (tier 0), the origin cuts at -eta/+eta (tier -1/2 / +1/2; eta is kept
# below every delta), an overshoot spike at value + delta_k (tier
# 1+sigma_k).  Distinct critical values differ by at least the gap while
# all offsets stay below a quarter of it, so lexicographic comparison of
# (value, tier) matches the geometric order exactly.

def _run_top(s: _Strand, sigma, modes) -> tuple[Fraction, Fraction]:
    end = s.top_end
    if end[0] == FREE:
        return s.vhi, Fraction(0)
    if end[0] == AT_ORIGIN:
        return s.vhi, Fraction(-1, 2)
    j = end[1]
    return s.vhi, Fraction(1 + sigma[j]) if modes[j] else Fraction(-1 - sigma[j])


def _run_bottom(s: _Strand, sigma, modes) -> tuple[Fraction, Fraction]:
    end = s.bottom_end
    if end[0] == FREE:
        return s.vlo, Fraction(0)
    if end[0] == AT_ORIGIN:
        return s.vlo, Fraction(1, 2)
    j = end[1]
    return s.vlo, Fraction(-1 - sigma[j]) if modes[j] else Fraction(1 + sigma[j])


def _hook_pos(fold: _Fold, sigma, modes) -> tuple[Fraction, Fraction]:
    t = Fraction(1 + sigma[fold.idx])
    over = modes[fold.idx]
    if fold.is_max:
        return fold.value, (t if over else -t)
    return fold.value, (-t if over else t)


def _blocks(s: _Strand, fold: _Fold, sigma, modes) -> bool:
    """Does strand s cross this fold's hook level (whatever the bands)?"""
    h = _hook_pos(fold, sigma, modes)
    return _run_bottom(s, sigma, modes) < h < _run_top(s, sigma, modes)


def _reaches_zero(s: _Strand, sigma, modes) -> bool:
    """Does the strand's drawn run enter the origin window |y| < eta?"""
    window_lo = (Fraction(0), Fraction(-1, 2))
    window_hi = (Fraction(0), Fraction(1, 2))
    return (_run_bottom(s, sigma, modes) < window_hi
            and _run_top(s, sigma, modes) > window_lo)


def _constraints(strands, folds, origin, sigma, modes):
    dominance: list[tuple[int, int]] = []  # (s, t): rank_s > rank_t
    avoid: list[tuple[int, int, int]] = []  # (x, a, b): rank_x outside (a, b) span
    adj = _origin_adjacent(origin)
    for s in strands:
        if s.idx not in adj and _reaches_zero(s, sigma, modes):
            for t in adj:
                dominance.append((s.idx, t))
    for fold in folds:
        a, b = fold.left, fold.left + 1
        for s in strands:
            if s.idx not in (a, b) and _blocks(s, fold, sigma, modes):
                avoid.append((s.idx, a, b))
    return dominance, avoid


def _solve_ranks(m: int, dominance, avoid, origin,
                 budget: int = 200_000) -> Optional[dict[int, int]]:
    """Backtracking search for a band order satisfying all constraints."""
    adj = set(_origin_adjacent(origin))
    # variable order: origin-adjacent strands first (they sit innermost)
    order = sorted(range(m), key=lambda i: (i not in adj, i))
    by_var: dict[int, list] = {i: [] for i in range(m)}
    for c in dominance:
        for v in c:
            by_var[v].append(("dom", c))
    for c in avoid:
        for v in c:
            by_var[v].append(("avoid", c))

    assign: dict[int, int] = {}
    free = set(range(m))
    nodes = 0

    def consistent(var: int) -> bool:
        for kind, c in by_var[var]:
            if kind == "dom":
                s, t = c
                if s in assign and t in assign and assign[s] <= assign[t]:
                    return False
            else:
                x, a, b = c
                if x in assign and a in assign and b in assign:
                    lo, hi = sorted((assign[a], assign[b]))
                    if lo < assign[x] < hi:
                        return False
        return True

    def search(depth: int) -> bool:
        nonlocal nodes
        if depth == m:
            return True
        var = order[depth]
        for r in sorted(free):
            nodes += 1
            if nodes > budget:
                return False
            assign[var] = r
            free.discard(r)
            if consistent(var) and search(depth + 1):
                return True
            del assign[var]
            free.add(r)
        return False

    if search(0):
        return dict(assign)
    return None


# ---------------------------------------------------------------------------
# geometry synthesis

def _param_at_value(f: PLMap, plo: Fraction, phi: Fraction, target: Fraction) -> Fraction:
    """Unique p in [plo, phi] with f(p) = target (f monotone there)."""
    bps = [b for b in f.breakpoints if plo <= b[0] <= phi]
    for (x0, y0), (x1, y1) in zip(bps, bps[1:]):
        lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
        if lo <= target <= hi:
            return x0 + (target - y0) * (x1 - x0) / (y1 - y0)
    raise ValueError(f"value {target} not attained on [{plo}, {phi}]")


def _emit(f: PLMap, strands, folds, origin, ranks, sigma, modes,
          epsilon: Fraction, band_cap, dev_cap, shrink: int) -> TuckArc:
    values = sorted({y for _, y in f.breakpoints} | {ZERO})
    gap = min(b - a for a, b in zip(values, values[1:]))
    vmin = min(abs(v) for v in values if v != 0)

    # |y - f| stays below 3/2 * delta on overshoot spikes, so keep the base
    # at a third of the deviation budget
    delta_base = min(gap / 4, epsilon / 6)
    if dev_cap is not None:
        delta_base = min(delta_base, dev_cap * Fraction(2, 3))
    delta_base /= 2 ** shrink
    eta = min(vmin / 4, delta_base / 4)
    F = len(folds)
    delta = {j: delta_base * (F + 1 + sigma[j]) / (2 * F + 2) for j in range(F)}

    m = len(strands)
    width = min(epsilon / 4, eta / 2)
    if band_cap is not None:
        width = min(width, band_cap)
    band = {s.idx: width * (ranks[s.idx] + 1) / (m + 1) for s in strands}

    def fold_levels(j: int) -> tuple[Fraction, Fraction]:
        """(run cut value, hook height) at fold j."""
        sign = 1 if folds[j].is_max else -1
        v = folds[j].value
        if modes[j]:
            return v - sign * delta[j] / 2, v + sign * delta[j]
        return v - sign * delta[j], v - sign * delta[j]

    def cut(strand: _Strand, end: tuple, at_lo: bool) -> tuple[Fraction, Fraction]:
        """(param, value) where this strand's f-tracking run stops."""
        p_end = strand.plo if at_lo else strand.phi
        if end[0] == FREE:
            return p_end, evaluate(f, p_end)
        if end[0] == AT_ORIGIN:
            # sign of f just inside the strand decides the wedge side
            target = eta if strand.rising == at_lo else -eta
            return _param_at_value(f, strand.plo, strand.phi, target), target
        cut_value, _ = fold_levels(end[1])
        return _param_at_value(f, strand.plo, strand.phi, cut_value), cut_value

    points: list[Point] = []
    params: list[Fraction] = []

    def push(p: Fraction, pos: Point):
        if params and params[-1] == p:
            return
        points.append(pos)
        params.append(p)

    for s in strands:
        d = band[s.idx]
        p_lo, _ = cut(s, s.lo_end, True)
        p_hi, _ = cut(s, s.hi_end, False)
        # entering overshoot spike (descending from the hook to the run)
        if s.lo_end[0] == FOLD and modes[s.lo_end[1]]:
            j = s.lo_end[1]
            _, hook = fold_levels(j)
            push((folds[j].param + p_lo) / 2, Point(d, hook))
        run_params = sorted({p_lo, p_hi}
                            | {x for x, _ in f.breakpoints if p_lo < x < p_hi})
        interior = origin[0] == "interior" and origin[1] == s.idx
        if interior:
            lo_w = _param_at_value(f, s.plo, s.phi, -eta if s.rising else eta)
            hi_w = _param_at_value(f, s.plo, s.phi, eta if s.rising else -eta)
            run_params = sorted(set(run_params) | {lo_w, ZERO, hi_w})
        for p in run_params:
            if interior and p == 0:
                push(p, ORIGIN)
            else:
                push(p, Point(d, evaluate(f, p)))
        # joint toward the next strand
        if s.hi_end[0] == AT_ORIGIN:
            push(ZERO, ORIGIN)
        elif s.hi_end[0] == FOLD:
            j = s.hi_end[1]
            _, hook = fold_levels(j)
            anchor_hi = (folds[j].param + p_hi) / 2 if modes[j] else p_hi
            if modes[j]:
                push(anchor_hi, Point(d, hook))  # exiting overshoot spike
            nxt = strands[s.idx + 1]
            p_next, _ = cut(nxt, nxt.lo_end, True)
            anchor_next = (folds[j].param + p_next) / 2 if modes[j] else p_next
            t = (folds[j].param - anchor_hi) / (anchor_next - anchor_hi)
            u = d + (band[nxt.idx] - d) * t
            push(folds[j].param, Point(u, hook))

    return TuckArc(ParamArc(tuple(points), tuple(params)), epsilon)


# ---------------------------------------------------------------------------
# certificate

def validate_tuck(t: TuckArc, f: PLMap) -> Certificate:
    """Re-derive every tuck invariant with exact predicates.

    Total: failures are reported in the certificate, never raised.  The
    deviation bound is checked at vertex parameters, which is exact because
    the check also requires every breakpoint of f to appear among the
    parameters: both the arc and p -> (0, f(p)) are then affine on each
    piece, so the squared deviation is convex there and maximal at piece
    endpoints.
    """
    checks: list[Check] = []
    arc = t.arc
    pts, ps = arc.points, arc.params

    if not fixes_zero(f):
        return Certificate("tuck", (Check("zero-fixing", False, "f(0) != 0"),))
    fz = require_zero_fixing(f)

    ok_struct = (ps[0] == -1 and ps[-1] == 1
                 and all(a < b for a, b in zip(ps, ps[1:]))
                 and all(p != q for p, q in zip(pts, pts[1:])))
    checks.append(Check("parameterization", ok_struct))

    if ZERO in ps:
        at0 = pts[ps.index(ZERO)]
        checks.append(Check("origin-vertex", at0 == ORIGIN, f"vertex at 0 is {at0}"))
    else:
        checks.append(Check("origin-vertex", False, "no vertex at parameter 0"))

    bad = [i for i, (p, q) in enumerate(zip(ps, pts)) if p != 0 and q.x <= 0]
    checks.append(Check("interior", not bad,
                        "" if not bad else f"vertex {bad[0]} touches the axis"))

    missing = [x for x, _ in fz.breakpoints if x not in ps]
    checks.append(Check("breakpoints-aligned", not missing,
                        "" if not missing else f"missing parameter {missing[0]}"))

    if ok_struct:
        simple, witness = polyline_is_simple(arc.polyline())
        checks.append(Check("simple", simple,
                            "" if simple else f"segments {witness} intersect"))
    else:
        checks.append(Check("simple", False, "structure invalid"))

    e2 = t.epsilon * t.epsilon
    dev_bad = None
    for p, q in zip(ps, pts):
        dy = q.y - evaluate(fz, p)
        if q.x * q.x + dy * dy >= e2:
            dev_bad = p
            break
    checks.append(Check("deviation", dev_bad is None,
                        "" if dev_bad is None else f"deviation >= eps at parameter {dev_bad}"))
    return Certificate("tuck", tuple(checks))


# ---------------------------------------------------------------------------
# constructor

def tuck_embed(f: PLMap, epsilon, *, band_cap=None, dev_cap=None,
               max_retries: int = 8) -> TuckArc:
    """Embed [-1, 1] into the half-plane eps-close to p -> (0, f(p)),
    touching the axis exactly at the origin.

    Requires f(0) = 0 and uniformly oriented departures (MixedDepartures
    propagates from the check).  Raises BandExhausted if no retry passes
    certification.
    """
    epsilon = rat(epsilon)
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    f = require_zero_fixing(f)
    assert_tuckable(f)
    strands, folds, origin = _structure(f)
    m, F = len(strands), len(folds)
    mode_vectors = _mode_order(F)
    for attempt in range(max_retries):
        sigma = {j: (j + attempt) % F for j in range(F)} if F else {}
        for modes in mode_vectors:
            dominance, avoid = _constraints(strands, folds, origin, sigma, modes)
            ranks = _solve_ranks(m, dominance, avoid, origin)
            if ranks is None:
                continue
            t = _emit(f, strands, folds, origin, ranks, sigma, modes,
                      epsilon, band_cap, dev_cap, shrink=attempt)
            if validate_tuck(t, f).ok:
                return t
    raise BandExhausted(f"no certified tuck after {max_retries} attempts")


def _mode_order(n_folds: int, cap: int = 1024) -> list[tuple[bool, ...]]:
    """Hook mode vectors, fewest overshoots first."""
    from itertools import combinations
    out: list[tuple[bool, ...]] = []
    for k in range(n_folds + 1):
        for picks in combinations(range(n_folds), k):
            v = [False] * n_folds
            for i in picks:
                v[i] = True
            out.append(tuple(v))
            if len(out) >= cap:
                return out
    return out
