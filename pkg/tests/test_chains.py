"""Chain covers: construction, validation, refinement, scene concatenation."""

import random
from fractions import Fraction

import pytest

from arcembed.chains import (DiskChain, chain_cover_scene, cover_polyline,
                             validate_chain, validate_refinement)
from arcembed.errors import (DegenerateArc, EntryNotInFirstLink,
                             NotARefinement, RayTouchesArc)
from arcembed.geom import (ORIGIN, Disk, Polyline, polyline,
                           polyline_in_disk_union, pt)


def chain_of(centers, r, mesh, origin_index=None):
    return DiskChain(tuple(Disk(pt(x, y), Fraction(r)) for x, y in centers),
                     Fraction(mesh), origin_index)


class TestValidateChain:
    def test_clean_three_link_chain(self):
        c = chain_of([(0, 0), (Fraction(3, 2), 0), (3, 0)], 1, 3)
        cert = validate_chain(c)
        assert cert.ok, cert.failures()

    def test_distant_overlap_rejected(self):
        c = chain_of([(0, 0), (1, 0), (Fraction(19, 10), 0)], 1, 3)
        cert = validate_chain(c)
        bad = {ch.name for ch in cert.failures()}
        assert "distant-links-disjoint" in bad

    def test_gap_rejected(self):
        c = chain_of([(0, 0), (5, 0), (10, 0)], 1, 3)
        assert any(ch.name == "adjacent-links-overlap" for ch in validate_chain(c).failures())

    def test_mesh_violation(self):
        c = chain_of([(0, 0), (Fraction(3, 2), 0)], 1, 2)
        assert any(ch.name == "mesh" for ch in validate_chain(c).failures())

    def test_origin_uniqueness_violation(self):
        c = DiskChain((Disk(pt(0, 0), Fraction(1)),
                       Disk(pt(Fraction(1, 2), 0), Fraction(1))), Fraction(3), 0)
        cert = validate_chain(c)
        assert any(ch.name == "origin-link-unique" for ch in cert.failures())


class TestCoverPolyline:
    def test_straight_segment(self):
        arc = polyline([(Fraction(1, 8), -1), (Fraction(1, 8), 1)])
        chain = cover_polyline(arc, Fraction(1, 2))
        assert validate_chain(chain).ok
        assert polyline_in_disk_union(arc, chain.links).ok
        assert 5 <= len(chain.links) <= 16

    def test_small_arc_single_link(self):
        arc = polyline([(Fraction(1, 8), 0), (Fraction(1, 4), Fraction(1, 8))])
        chain = cover_polyline(arc, 1)
        assert validate_chain(chain).ok
        assert polyline_in_disk_union(arc, chain.links).ok

    def test_u_shape_close_limbs(self):
        # limbs 1/100 apart force radii <= clearance/4: distant links disjoint
        arc = polyline([(0, 1), (0, 0), (Fraction(1, 100), 0), (Fraction(1, 100), 1)])
        chain = cover_polyline(arc, Fraction(1, 2))
        cert = validate_chain(chain)
        assert cert.ok, cert.failures()
        assert polyline_in_disk_union(arc, chain.links).ok
        assert all(d.radius <= Fraction(1, 400) for d in chain.links)
        # brute-force non-adjacent disjointness oracle
        from arcembed.geom import disks_overlap
        ls = chain.links
        for i in range(len(ls)):
            for j in range(i + 2, len(ls)):
                assert not disks_overlap(ls[i], ls[j]), (i, j)

    def test_origin_anchoring(self):
        arc = polyline([(Fraction(1, 8), -1), (0, 0), (Fraction(1, 8), 1)])
        chain = cover_polyline(arc, Fraction(1, 2), origin=ORIGIN)
        assert chain.origin_index is not None
        assert validate_chain(chain).ok

    def test_self_touching_arc_rejected(self):
        arc = polyline([(0, 0), (2, 0), (2, 1), (1, 0)])  # touches interior
        with pytest.raises(DegenerateArc):
            cover_polyline(arc, Fraction(1, 2))

    def test_finer_epsilon_more_links(self):
        arc = polyline([(Fraction(1, 8), -1), (Fraction(1, 8), 1)])
        coarse = cover_polyline(arc, Fraction(1, 2))
        fine = cover_polyline(arc, Fraction(1, 8))
        assert len(fine.links) >= len(coarse.links)


class TestRefinement:
    def test_shrunken_chain_refines(self):
        parent = chain_of([(0, 0), (Fraction(3, 2), 0), (3, 0)], 1, 3)
        child = chain_of([(Fraction(k, 5) * 3, 0) for k in range(6)],
                         Fraction(1, 3), 1)
        assert validate_chain(child).ok
        w = validate_refinement(child, parent)
        assert len(w.child_to_parent) == 6
        assert all(0 <= p <= 2 for p in w.child_to_parent)

    def test_protruding_child_rejected(self):
        parent = chain_of([(0, 0), (Fraction(3, 2), 0)], 1, 3)
        child = chain_of([(0, 0), (Fraction(1, 2), 0), (5, 0)], Fraction(1, 3), 1)
        with pytest.raises(NotARefinement) as exc:
            validate_refinement(child, parent)
        assert exc.value.child_index == 2


class TestSceneChain:
    def setup_method(self):
        # a short vertical stage arc with its cover
        self.arc = polyline([(Fraction(1, 8), -1), (Fraction(1, 8), 1)])
        self.x_chain = cover_polyline(self.arc, Fraction(1, 2))

    def test_straight_ray_concatenates(self):
        first = self.x_chain.links[0]
        # ray approaches the first link from far below-left, stopping inside
        # the link but clear of the arc
        tip = (first.center.x - first.radius / 2,
               first.center.y - first.radius / 4)
        ray = polyline([(-3, -4), tip])
        scene = chain_cover_scene(self.x_chain, ray, Fraction(1, 2), arc=self.arc)
        assert validate_chain(scene).ok
        assert len(scene.links) > len(self.x_chain.links)

    def test_ray_entering_second_link_rejected(self):
        second = self.x_chain.links[2]
        ray = polyline([(-3, second.center.y),
                        (second.center.x - second.radius / 2, second.center.y)])
        with pytest.raises(EntryNotInFirstLink):
            chain_cover_scene(self.x_chain, ray, Fraction(1, 2), arc=self.arc)

    def test_ray_touching_arc_rejected(self):
        ray = polyline([(-3, 0), (Fraction(1, 8), 0)])
        with pytest.raises(RayTouchesArc):
            chain_cover_scene(self.x_chain, ray, Fraction(1, 2), arc=self.arc)
