"""PL map construction, evaluation and composition."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arcembed.errors import (ConstantPiece, DomainNotFull, NotMonotoneDomain,
                             OutOfDomain, OutOfRange)
from arcembed.pl_maps import (compose, evaluate, fixes_zero, laps, make_pl_map,
                              normalize, preimages, with_zero_breakpoint)

IDENTITY = make_pl_map([(-1, -1), (1, 1)])
VEE = make_pl_map([(-1, 1), (0, 0), (1, 1)])
WIGGLE = make_pl_map([(-1, -1), (Fraction(-1, 2), Fraction(1, 4)), (0, 0), (1, 1)])


class TestMakePLMap:
    def test_identity(self):
        assert IDENTITY.breakpoints == ((Fraction(-1), Fraction(-1)), (Fraction(1), Fraction(1)))

    def test_vee(self):
        assert len(VEE.breakpoints) == 3

    def test_constant_piece_rejected(self):
        with pytest.raises(ConstantPiece):
            make_pl_map([(-1, 0), (0, 0), (1, 1)])

    def test_domain_not_full(self):
        with pytest.raises(DomainNotFull):
            make_pl_map([(Fraction(-1, 2), 0), (1, 1)])

    def test_not_monotone(self):
        with pytest.raises(NotMonotoneDomain):
            make_pl_map([(-1, 0), (Fraction(1, 2), 1), (Fraction(1, 4), 0), (1, 1)])

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            make_pl_map([(-1, -2), (1, 1)])


class TestEvaluate:
    def test_identity_third(self):
        assert evaluate(IDENTITY, Fraction(1, 3)) == Fraction(1, 3)

    def test_vee(self):
        assert evaluate(VEE, Fraction(-1, 2)) == Fraction(1, 2)

    def test_wiggle_interpolation(self):
        # slope 5/2 on the first piece
        assert evaluate(WIGGLE, Fraction(-9, 10)) == Fraction(-3, 4)

    def test_out_of_domain(self):
        with pytest.raises(OutOfDomain):
            evaluate(IDENTITY, 2)


class TestCompose:
    def test_identity_neutral(self):
        assert normalize(compose(IDENTITY, WIGGLE)) == normalize(WIGGLE)
        assert normalize(compose(WIGGLE, IDENTITY)) == normalize(WIGGLE)

    def test_vee_squared_is_vee(self):
        # V(x) = |x| and |x| >= 0 where V is the identity, checked on a 1/16 grid
        vv = compose(VEE, VEE)
        x = Fraction(-1)
        while x <= 1:
            assert evaluate(vv, x) == evaluate(VEE, x)
            x += Fraction(1, 16)
        assert normalize(vv) == normalize(VEE)

    grid_x = st.fractions(min_value=-1, max_value=1, max_denominator=48)

    @given(x=grid_x)
    @settings(max_examples=200, deadline=None)
    def test_composition_pointwise(self, x):
        h = compose(WIGGLE, VEE)
        assert evaluate(h, x) == evaluate(WIGGLE, evaluate(VEE, x))

    def test_zero_fixing_preserved(self):
        h = compose(WIGGLE, VEE)
        assert fixes_zero(h)


class TestStructure:
    def test_preimages(self):
        assert preimages(VEE, Fraction(1, 2)) == [Fraction(-1, 2), Fraction(1, 2)]

    def test_laps_vee(self):
        assert laps(VEE) == [(Fraction(-1), Fraction(0), -1), (Fraction(0), Fraction(1), 1)]

    def test_laps_merge_collinear(self):
        f = make_pl_map([(-1, -1), (0, 0), (Fraction(1, 2), Fraction(1, 2)), (1, 1)])
        assert len(laps(f)) == 1

    def test_with_zero_breakpoint(self):
        f = make_pl_map([(-1, -1), (1, 1)])
        g = with_zero_breakpoint(f)
        assert (Fraction(0), Fraction(0)) in g.breakpoints
        assert normalize(g) == normalize(f)
