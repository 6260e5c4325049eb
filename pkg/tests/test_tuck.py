"""Tuck embedding construction and its exact certificate."""

import random
from fractions import Fraction

import pytest

from arcembed.errors import MixedDepartures
from arcembed.geom import ORIGIN, ParamArc, Point
from arcembed.pl_maps import evaluate, make_pl_map
from arcembed.tuck import TuckArc, tuck_embed, validate_tuck
from .helpers import random_tuckable_map

IDENTITY = make_pl_map([(-1, -1), (1, 1)])
NEGATION = make_pl_map([(-1, 1), (1, -1)])
VEE = make_pl_map([(-1, 1), (0, 0), (1, 1)])
WIGGLE = make_pl_map([(-1, -1), (Fraction(-1, 2), Fraction(1, 4)), (0, 0), (1, 1)])
MIXED = make_pl_map([(-1, -1), (Fraction(-1, 2), Fraction(1, 2)), (0, 0),
                     (Fraction(1, 2), Fraction(-1, 2)), (1, 1)])


def wedge_arc(eps_x=Fraction(1, 8)):
    """The canonical wedge solution for the identity: (|p|/8, p)."""
    return TuckArc(
        ParamArc((Point(eps_x, Fraction(-1)), ORIGIN, Point(eps_x, Fraction(1))),
                 (Fraction(-1), Fraction(0), Fraction(1))),
        Fraction(1, 4),
    )


class TestValidator:
    def test_canonical_wedge_valid(self):
        cert = validate_tuck(wedge_arc(), IDENTITY)
        assert cert.ok, cert.failures()

    def test_mirror_wedge_valid(self):
        arc = TuckArc(
            ParamArc((Point(Fraction(1, 8), Fraction(1)), ORIGIN,
                      Point(Fraction(1, 8), Fraction(-1))),
                     (Fraction(-1), Fraction(0), Fraction(1))),
            Fraction(1, 4))
        cert = validate_tuck(arc, NEGATION)
        assert cert.ok, cert.failures()

    def test_boundary_contact_fails(self):
        # one vertex moved onto the axis at parameter 1/2
        arc = TuckArc(
            ParamArc((Point(Fraction(1, 8), Fraction(-1)), ORIGIN,
                      Point(Fraction(0), Fraction(1, 2)),
                      Point(Fraction(1, 8), Fraction(1))),
                     (Fraction(-1), Fraction(0), Fraction(1, 2), Fraction(1))),
            Fraction(1, 4))
        cert = validate_tuck(arc, IDENTITY)
        assert not cert.ok
        assert any(c.name == "interior" and not c.ok for c in cert.checks)

    def test_crossing_fails_simplicity(self):
        arc = TuckArc(
            ParamArc((Point(Fraction(1, 8), Fraction(-1)), ORIGIN,
                      Point(Fraction(1, 4), Fraction(1, 2)),
                      Point(Fraction(1, 16), Fraction(-1, 2)),
                      Point(Fraction(1, 2), Fraction(1))),
                     (Fraction(-1), Fraction(0), Fraction(1, 4),
                      Fraction(1, 2), Fraction(1))),
            Fraction(4))
        cert = validate_tuck(arc, IDENTITY)
        assert any(c.name == "simple" and not c.ok for c in cert.checks)

    def test_deviation_budget_enforced(self):
        cert = validate_tuck(wedge_arc(Fraction(1, 2)), IDENTITY)
        assert any(c.name == "deviation" and not c.ok for c in cert.checks)


class TestEmbed:
    @pytest.mark.parametrize("f", [IDENTITY, NEGATION, VEE, WIGGLE],
                             ids=["identity", "negation", "vee", "wiggle"])
    @pytest.mark.parametrize("eps", [Fraction(1, 4), Fraction(1, 16), Fraction(1, 64)])
    def test_named_maps(self, f, eps):
        t = tuck_embed(f, eps)
        cert = validate_tuck(t, f)
        assert cert.ok, cert.failures()

    def test_wiggle_exhaustive_crossing_oracle(self):
        # independent simplicity check: brute force over all segment pairs
        from arcembed.geom import seg_intersect
        t = tuck_embed(WIGGLE, Fraction(1, 10))
        segs = t.arc.polyline().segments()
        for i in range(len(segs)):
            for j in range(i + 2, len(segs)):
                assert seg_intersect(segs[i], segs[j]).kind == "disjoint"

    def test_mixed_rejected(self):
        with pytest.raises(MixedDepartures):
            tuck_embed(MIXED, Fraction(1, 4))

    def test_monotone_gives_unimodal_x(self):
        t = tuck_embed(IDENTITY, Fraction(1, 4))
        xs = [p.x for p in t.arc.points]
        i0 = xs.index(min(xs))
        assert t.arc.params[i0] == 0
        assert all(a >= b for a, b in zip(xs[:i0], xs[1:i0 + 1]))
        assert all(a <= b for a, b in zip(xs[i0:], xs[i0 + 1:]))

    def test_vertex_budget_linear_in_breakpoints(self):
        rng = random.Random(7)
        for _ in range(25):
            f = random_tuckable_map(rng)
            t = tuck_embed(f, Fraction(1, 16))
            assert len(t.arc.points) <= 8 * len(f.breakpoints) + 16

    def test_y_tracks_f_at_breakpoint_params(self):
        t = tuck_embed(WIGGLE, Fraction(1, 16))
        arc = t.arc
        for x, y in WIGGLE.breakpoints:
            i = arc.params.index(x)
            # at a fold parameter the hook sits within the cut of the value
            assert abs(arc.points[i].y - y) < Fraction(1, 16)


class TestEmbedRandom:
    @pytest.mark.parametrize("eps", [Fraction(1, 4), Fraction(1, 16), Fraction(1, 64)])
    def test_random_tuckable_maps(self, eps):
        rng = random.Random(int(eps.denominator))
        for _ in range(40):
            f = random_tuckable_map(rng)
            t = tuck_embed(f, eps)
            cert = validate_tuck(t, f)
            assert cert.ok, (f, cert.failures())
