"""Radial departures of a zero-fixing PL map.

A pair <x1, x2> with -1 <= x1 < 0 < x2 <= 1 is a departure when the image of
the open interval (x1, x2) is exactly the open interval between the endpoint
values.  For a nowhere-constant PL map this reduces to exact extremum
bookkeeping over the breakpoints inside the pair:

  positive  <=>  max of f on [x1,x2] is attained only at x2 and the min only
                 at x1 (then automatically f(x1) < 0 < f(x2));
  negative  <=>  the mirror image, with f(x2) < 0 < f(x1).

Orientation presence is decided on the finite critical grid (breakpoint
abscissae plus every preimage of a breakpoint ordinate): if a departure of
some orientation exists, its endpoints can be pushed outward along their
linear pieces to breakpoints without changing orientation, so the grid
search is complete.  An independent dense-sampling oracle is exposed for
cross-checking that claim.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import MixedDepartures, NegativeDepartures, NotZeroFixing
from .geom import rat
from .pl_maps import (InverseSystemSpec, PLMap, evaluate, fixes_zero,
                      preimages, require_zero_fixing)

POSITIVE = "positive"
NEGATIVE = "negative"


@dataclass(frozen=True)
class RadialDeparture:
    x1: Fraction
    x2: Fraction
    orientation: str


def _check_zero_fixing(f: PLMap) -> None:
    if not fixes_zero(f):
        raise NotZeroFixing("radial departures are defined only for f(0) = 0")


def is_departure(f: PLMap, x1, x2) -> Optional[str]:
    """Classify the pair: "positive", "negative", or None."""
    _check_zero_fixing(f)
    x1, x2 = rat(x1), rat(x2)
    if not (Fraction(-1) <= x1 < 0 < x2 <= Fraction(1)):
        raise ValueError("need -1 <= x1 < 0 < x2 <= 1")
    v1 = evaluate(f, x1)
    v2 = evaluate(f, x2)
    inner = [y for x, y in f.breakpoints if x1 < x < x2]
    if inner:
        mx, mn = max(inner), min(inner)
        if v1 < v2 and mx < v2 and mn > v1:
            return POSITIVE
        if v2 < v1 and mx < v1 and mn > v2:
            return NEGATIVE
        return None
    # no interior breakpoint: f is linear across 0 with f(0) = 0
    if v1 < v2:
        return POSITIVE
    return NEGATIVE


def critical_grid(f: PLMap) -> list[Fraction]:
    """Breakpoint abscissae plus all preimages of breakpoint ordinates."""
    xs: set[Fraction] = set(f.xs)
    for y in set(f.ys):
        xs.update(preimages(f, y))
    return sorted(xs)


def departure_witnesses(f: PLMap) -> dict[str, RadialDeparture]:
    """One witness per orientation present, found on the critical grid."""
    _check_zero_fixing(f)
    grid = critical_grid(f)
    lefts = [x for x in grid if Fraction(-1) <= x < 0]
    rights = [x for x in grid if 0 < x <= Fraction(1)]
    found: dict[str, RadialDeparture] = {}
    for x1 in lefts:
        for x2 in rights:
            o = is_departure(f, x1, x2)
            if o is not None and o not in found:
                found[o] = RadialDeparture(x1, x2, o)
                if len(found) == 2:
                    return found
    return found


def orientations_present(f: PLMap) -> frozenset[str]:
    return frozenset(departure_witnesses(f))


@dataclass(frozen=True)
class TuckabilityReport:
    witnesses: tuple[RadialDeparture, ...]  # one per orientation present


def assert_tuckable(f: PLMap) -> TuckabilityReport:
    """Succeed iff all departures share one orientation (or none exist)."""
    found = departure_witnesses(f)
    if POSITIVE in found and NEGATIVE in found:
        raise MixedDepartures(
            (found[POSITIVE].x1, found[POSITIVE].x2),
            (found[NEGATIVE].x1, found[NEGATIVE].x2),
        )
    return TuckabilityReport(tuple(found.values()))


def validate_system(maps) -> InverseSystemSpec:
    """Build an inverse-system spec: zero-fixing maps, no negative departures.

    Raises MixedDepartures when both orientations are present, otherwise
    NegativeDepartures when any negative departure exists.
    """
    checked = []
    for f in maps:
        f = require_zero_fixing(f)
        found = departure_witnesses(f)
        if POSITIVE in found and NEGATIVE in found:
            w = found[POSITIVE], found[NEGATIVE]
            raise MixedDepartures((w[0].x1, w[0].x2), (w[1].x1, w[1].x2))
        if NEGATIVE in found:
            w = found[NEGATIVE]
            raise NegativeDepartures((w.x1, w.x2))
        checked.append(f)
    return InverseSystemSpec(tuple(checked))


# ---------------------------------------------------------------------------
# dense-sampling oracle (independent cross-check of the grid search)

_INT64_GUARD = 2**62


def _int64_safe(f: PLMap, lattice_factor: int) -> Optional[tuple]:
    """Scale breakpoints to a common integer lattice if int64 bounds allow."""
    from math import lcm
    L = 1
    for x, y in f.breakpoints:
        L = lcm(L, x.denominator, y.denominator)
    c = lattice_factor
    # worst-case magnitudes for the comparisons below
    A_max = 4 * c * L * L            # evaluation numerator
    D_max = 2 * L * c                # scaled piece width
    if A_max * D_max >= _INT64_GUARD or L * D_max >= _INT64_GUARD:
        return None
    Xc = np.array([int(x * L * c) for x in f.xs], dtype=np.int64)
    Y = np.array([int(y * L) for y in f.ys], dtype=np.int64)
    return Xc, Y, L, c


def sample_orientations(f: PLMap, n_pairs: int = 100_000, seed: int = 0,
                        lattice_factor: int = 64) -> frozenset[str]:
    """Brute-force oracle: test n_pairs random rational pairs exactly.

    Pairs are drawn uniformly from a fine rational lattice refining the
    map's own denominators, so every arithmetic comparison is exact integer
    work (vectorized when int64 bounds allow, element-wise Fractions
    otherwise).  The result can only under-report orientations relative to
    the full grid search.
    """
    _check_zero_fixing(f)
    packed = _int64_safe(f, lattice_factor)
    if packed is None:
        return _sample_fraction_fallback(f, min(n_pairs, 2000), seed)
    Xc, Y, L, c = packed
    Q = L * c
    rng = np.random.default_rng(seed)
    n1 = rng.integers(-Q, 0, size=n_pairs, dtype=np.int64)       # x1 in [-1, 0)
    n2 = rng.integers(1, Q + 1, size=n_pairs, dtype=np.int64)    # x2 in (0, 1]

    k = len(Xc)

    def eval_scaled(n):
        i = np.searchsorted(Xc, n, side="right") - 1
        np.clip(i, 0, k - 2, out=i)
        A = Y[i] * (Xc[i + 1] - n) + Y[i + 1] * (n - Xc[i])
        D = Xc[i + 1] - Xc[i]
        return A, D  # value = A / (L * D)

    A1, D1 = eval_scaled(n1)
    A2, D2 = eval_scaled(n2)

    lo = np.searchsorted(Xc, n1, side="right")
    hi = np.searchsorted(Xc, n2, side="left")
    SENT_MIN = np.int64(-(2**62))
    SENT_MAX = np.int64(2**62)
    inner_max = np.full(n_pairs, SENT_MIN, dtype=np.int64)
    inner_min = np.full(n_pairs, SENT_MAX, dtype=np.int64)
    for j in range(k):
        sel = (lo <= j) & (j < hi)
        if sel.any():
            np.maximum(inner_max, np.where(sel, Y[j], SENT_MIN), out=inner_max)
            np.minimum(inner_min, np.where(sel, Y[j], SENT_MAX), out=inner_min)
    has_inner = lo < hi

    v1_lt_v2 = A1 * D2 < A2 * D1
    # inner values are Y/L; f(xi) = Ai/(L*Di): compare Y*Di vs Ai
    pos = v1_lt_v2 & (~has_inner | ((inner_max * D2 < A2) & (inner_min * D1 > A1)))
    neg = (~v1_lt_v2) & (~has_inner | ((inner_max * D1 < A1) & (inner_min * D2 > A2)))
    # ~v1_lt_v2 alone is not "v2 < v1" when equal; equality kills both tests
    eq = A1 * D2 == A2 * D1
    neg &= ~eq

    found = set()
    if bool(pos.any()):
        found.add(POSITIVE)
    if bool(neg.any()):
        found.add(NEGATIVE)
    return frozenset(found)


def _sample_fraction_fallback(f: PLMap, n_pairs: int, seed: int) -> frozenset[str]:
    import random
    rng = random.Random(seed)
    found: set[str] = set()
    for _ in range(n_pairs):
        den = rng.randrange(8, 4096)
        x1 = Fraction(-rng.randrange(1, den + 1), den)
        x2 = Fraction(rng.randrange(1, den + 1), den)
        o = is_departure(f, x1, x2)
        if o:
            found.add(o)
            if len(found) == 2:
                break
    return frozenset(found)
