"""Piecewise-linear self-maps of [-1, 1] and their exact algebra.

A map is an ordered list of rational breakpoints spanning exactly [-1, 1],
nowhere constant (no two consecutive ordinates equal).  Collinear
(redundant) breakpoints are representable -- composition naturally creates
them -- and :func:`normalize` removes them so maps have a normal form.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction

from .errors import (ConstantPiece, DomainNotFull, NotMonotoneDomain,
                     NotZeroFixing, OutOfDomain, OutOfRange)
from .geom import ONE, ZERO, rat

NEG_ONE = Fraction(-1)


@dataclass(frozen=True)
class PLMap:
    breakpoints: tuple[tuple[Fraction, Fraction], ...]

    @property
    def xs(self) -> tuple[Fraction, ...]:
        return tuple(b[0] for b in self.breakpoints)

    @property
    def ys(self) -> tuple[Fraction, ...]:
        return tuple(b[1] for b in self.breakpoints)

    def __str__(self):
        return "PL[" + ", ".join(f"({x},{y})" for x, y in self.breakpoints) + "]"


def make_pl_map(points) -> PLMap:
    """Validate breakpoint data into a PLMap.

    Raises NotMonotoneDomain / OutOfRange / ConstantPiece / DomainNotFull.
    """
    bps = tuple((rat(x), rat(y)) for x, y in points)
    if len(bps) < 2:
        raise DomainNotFull("need at least 2 breakpoints")
    for (x0, _), (x1, _) in zip(bps, bps[1:]):
        if x0 >= x1:
            raise NotMonotoneDomain(f"abscissae not strictly increasing at x={x1}")
    if bps[0][0] != NEG_ONE or bps[-1][0] != ONE:
        raise DomainNotFull("domain must be exactly [-1, 1]")
    for x, y in bps:
        if y < NEG_ONE or y > ONE:
            raise OutOfRange(f"value {y} at x={x} outside [-1, 1]")
    for (_, y0), (x1, y1) in zip(bps, bps[1:]):
        if y0 == y1:
            raise ConstantPiece(f"flat piece ending at x={x1}")
    return PLMap(bps)


def evaluate(f: PLMap, x) -> Fraction:
    """Exact linear interpolation on the piece containing x."""
    x = rat(x)
    if x < NEG_ONE or x > ONE:
        raise OutOfDomain(f"{x} outside [-1, 1]")
    xs = f.xs
    i = bisect_right(xs, x) - 1
    if i >= len(xs) - 1:
        i = len(xs) - 2
    (x0, y0), (x1, y1) = f.breakpoints[i], f.breakpoints[i + 1]
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0)


def normalize(f: PLMap) -> PLMap:
    """Drop collinear interior breakpoints; makes equality testing meaningful."""
    bps = list(f.breakpoints)
    out = [bps[0]]
    for i in range(1, len(bps) - 1):
        x0, y0 = out[-1]
        x1, y1 = bps[i]
        x2, y2 = bps[i + 1]
        # collinear iff the slopes on both sides agree
        if (y1 - y0) * (x2 - x1) == (y2 - y1) * (x1 - x0):
            continue
        out.append(bps[i])
    out.append(bps[-1])
    return PLMap(tuple(out))


def fixes_zero(f: PLMap) -> bool:
    return evaluate(f, ZERO) == 0


def with_zero_breakpoint(f: PLMap) -> PLMap:
    """Insert a (0, f(0)) breakpoint if absent (collinear; value-preserving)."""
    if any(x == 0 for x in f.xs):
        return f
    y0 = evaluate(f, ZERO)
    bps = list(f.breakpoints)
    i = bisect_right(f.xs, ZERO)
    bps.insert(i, (ZERO, y0))
    return PLMap(tuple(bps))


def require_zero_fixing(f: PLMap) -> PLMap:
    """Check f(0) = 0 and return a representation with the (0,0) breakpoint."""
    if not fixes_zero(f):
        raise NotZeroFixing(f"f(0) = {evaluate(f, ZERO)} != 0")
    return with_zero_breakpoint(f)


def preimages(f: PLMap, y) -> list[Fraction]:
    """All x with f(x) = y, exactly (finite since f is nowhere constant)."""
    y = rat(y)
    found: set[Fraction] = set()
    for (x0, y0), (x1, y1) in zip(f.breakpoints, f.breakpoints[1:]):
        lo, hi = (y0, y1) if y0 < y1 else (y1, y0)
        if y < lo or y > hi:
            continue
        x = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
        found.add(x)
    return sorted(found)


def compose(f: PLMap, g: PLMap) -> PLMap:
    """Exact PL composition f(g(x)).

    Breakpoints: g's breakpoints plus all g-preimages of f's breakpoint
    abscissae.  The result is validated and normalized.
    """
    params: set[Fraction] = set(g.xs)
    for bx in f.xs:
        params.update(preimages(g, bx))
    grid = sorted(params)
    bps = tuple((x, evaluate(f, evaluate(g, x))) for x in grid)
    # composition of nowhere-constant maps can still produce flat pieces only
    # if f folds exactly at a value g holds... it cannot: g is nowhere
    # constant and between consecutive grid points g is strictly monotone
    # into a single piece of f, so the composite piece is nonconstant.
    return normalize(make_pl_map(bps))


def laps(f: PLMap) -> list[tuple[Fraction, Fraction, int]]:
    """Maximal monotone runs as (param_lo, param_hi, direction ±1).

    Collinear breakpoints do not break a lap; only sign changes do.
    """
    bps = f.breakpoints
    out: list[tuple[Fraction, Fraction, int]] = []
    start = bps[0][0]
    cur_dir = 1 if bps[1][1] > bps[0][1] else -1
    for i in range(1, len(bps) - 1):
        d = 1 if bps[i + 1][1] > bps[i][1] else -1
        if d != cur_dir:
            out.append((start, bps[i][0], cur_dir))
            start = bps[i][0]
            cur_dir = d
    out.append((start, bps[-1][0], cur_dir))
    return out


@dataclass(frozen=True)
class InverseSystemSpec:
    """A validated list of zero-fixing bonding maps with no negative
    radial departures (the normalized form the tower construction needs).

    Build through :func:`arcembed.departures.validate_system`.
    """

    maps: tuple[PLMap, ...]

    def __len__(self):
        return len(self.maps)
