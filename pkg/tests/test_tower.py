"""Stage tower construction and its per-stage certificates."""

from fractions import Fraction

import pytest

from arcembed.chains import validate_chain, validate_refinement
from arcembed.departures import validate_system
from arcembed.geom import ORIGIN, ZERO, polyline_in_disk_union
from arcembed.pl_maps import evaluate, make_pl_map
from arcembed.tower import initial_stage, run_tower, stage_step

IDENTITY = make_pl_map([(-1, -1), (1, 1)])
VEE = make_pl_map([(-1, 1), (0, 0), (1, 1)])
WIGGLE = make_pl_map([(-1, -1), (Fraction(-1, 2), Fraction(1, 4)), (0, 0), (1, 1)])


class TestInitialStage:
    def test_wedge_shape(self):
        omega, chain = initial_stage(Fraction(1, 8))
        assert omega.points[1] == ORIGIN
        assert omega.params == (Fraction(-1), ZERO, Fraction(1))
        assert omega.points[0].x == Fraction(1, 8)

    def test_chain_valid_and_anchored(self):
        omega, chain = initial_stage(Fraction(1, 8), Fraction(1, 2))
        cert = validate_chain(chain)
        assert cert.ok, cert.failures()
        assert chain.origin_index is not None
        assert polyline_in_disk_union(omega.polyline(), chain.links).ok


class TestStageStep:
    def test_identity_step(self):
        omega, chain = initial_stage(Fraction(1, 8), Fraction(1, 2))
        o2, c2, cert, wit = stage_step(omega, chain, IDENTITY,
                                       Fraction(1, 256), Fraction(1, 3))
        assert cert.ok, cert.failures()
        # closeness: new arc hugs the old one under the bonding map
        for p, q in zip(o2.params, o2.points):
            target = omega.eval(evaluate(IDENTITY, p))
            assert q.dist2(target) < Fraction(1, 256) ** 2

    def test_vee_step_simple(self):
        omega, chain = initial_stage(Fraction(1, 8), Fraction(1, 2))
        o2, c2, cert, wit = stage_step(omega, chain, VEE,
                                       Fraction(1, 256), Fraction(1, 3))
        assert cert.ok, cert.failures()
        from arcembed.geom import polyline_is_simple, seg_intersect
        segs = o2.polyline().segments()
        for i in range(len(segs)):
            for j in range(i + 2, len(segs)):
                assert seg_intersect(segs[i], segs[j]).kind == "disjoint"

    def test_margin_guard(self):
        from arcembed.errors import MarginTooSmall
        omega, chain = initial_stage(Fraction(1, 8), Fraction(1, 2))
        with pytest.raises(MarginTooSmall):
            stage_step(omega, chain, IDENTITY, Fraction(10), Fraction(1, 3))


class TestRunTower:
    def test_identity_tower(self):
        system = validate_system([IDENTITY] * 3)
        tower = run_tower(system, 3)
        assert tower.ok
        assert len(tower.stages) == 3
        assert sum(tower.eps_schedule) < 2 * tower.eps_schedule[0]
        for child, parent, wit in zip(tower.stages[1:], tower.stages,
                                      tower.refinements):
            assert len(wit.child_to_parent) == len(child.chain.links)

    def test_wiggle_tower(self):
        system = validate_system([WIGGLE] * 3)
        tower = run_tower(system, 3)
        assert tower.ok

    def test_mesh_schedule_validation(self):
        system = validate_system([IDENTITY] * 3)
        with pytest.raises(ValueError):
            run_tower(system, 3, mesh_schedule=[Fraction(1, 2), Fraction(2, 3), Fraction(1, 4)])
        with pytest.raises(ValueError):
            run_tower(system, 3, mesh_schedule=[Fraction(1, 2), Fraction(1, 3), Fraction(1, 3)])

    def test_too_few_maps(self):
        system = validate_system([IDENTITY])
        with pytest.raises(ValueError):
            run_tower(system, 2)
