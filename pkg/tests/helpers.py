"""Shared random-map generators for tests (seeded, deterministic)."""

import random
from fractions import Fraction

from arcembed.departures import assert_tuckable
from arcembed.errors import MixedDepartures, NegativeDepartures
from arcembed.pl_maps import PLMap, make_pl_map, require_zero_fixing


def random_zero_fixing_map(rng: random.Random, max_breakpoints: int = 9,
                           den: int = 8) -> PLMap:
    """A random nowhere-constant zero-fixing map on a /den lattice.

    Breakpoint count <= max_breakpoints; a (0,0) breakpoint is always
    present so the zero-fixing flag holds structurally.
    """
    while True:
        n_extra = rng.randrange(0, max_breakpoints - 2)
        xs = {Fraction(-1), Fraction(0), Fraction(1)}
        while len(xs) < n_extra + 3:
            xs.add(Fraction(rng.randrange(-den + 1, den), den))
        xs = sorted(xs)
        ys = []
        for x in xs:
            if x == 0:
                ys.append(Fraction(0))
                continue
            y = Fraction(rng.randrange(-den, den + 1), den)
            ys.append(y)
        ok = all(a != b for a, b in zip(ys, ys[1:]))
        if not ok:
            continue
        return make_pl_map(list(zip(xs, ys)))


def random_tuckable_map(rng: random.Random, max_breakpoints: int = 9,
                        den: int = 8) -> PLMap:
    """Rejection-sample maps whose departures share one orientation."""
    while True:
        f = random_zero_fixing_map(rng, max_breakpoints, den)
        try:
            assert_tuckable(require_zero_fixing(f))
            return f
        except MixedDepartures:
            continue


def random_system_map(rng: random.Random, max_breakpoints: int = 7,
                      den: int = 8) -> PLMap:
    """Rejection-sample maps with no negative departures at all."""
    from arcembed.departures import validate_system
    while True:
        f = random_zero_fixing_map(rng, max_breakpoints, den)
        try:
            validate_system([f])
            return f
        except (MixedDepartures, NegativeDepartures):
            continue
