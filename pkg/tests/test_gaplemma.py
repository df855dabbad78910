from fractions import Fraction as F

import pytest

from thickset.errors import DimensionMismatch, NotLinkedSets
from thickset.gaplemma import Exterior, containment_in_gap, gap_lemma_decide, linked, linked_refine
from thickset.geometry import Ball, Box
from thickset.sets import CentralCantor, Explicit, Sponge, Translate, locate

FIFTHS = CentralCantor(keep_ratio=F(2, 5))


def test_overlapping_balls_are_linked():
    v = linked(Ball((0, 0), 1), Ball((F(3, 2), 0), 1))
    assert v.tag == "linked"
    assert len(v.witnesses) == 2


def test_nested_balls_are_not_linked():
    assert linked(Ball((0, 0), 1), Ball((0, 0), F(1, 2))).tag == "not_linked"


def test_far_balls_are_disjoint():
    assert linked(Ball((0, 0), 1), Ball((5, 0), 1)).tag == "disjoint"


def test_overlapping_intervals_are_linked():
    assert linked(Box((0,), (1,)), Box((F(1, 2),), (2,))).tag == "linked"


def test_exterior_against_bounded_gap():
    outside = Exterior(Box((0,), (1,)))
    assert linked(outside, Box((F(1, 2),), (2,))).tag == "linked"
    assert linked(outside, Box((F(1, 4),), (F(3, 4),))).tag == "disjoint"


def test_mixed_dimensions_rejected():
    with pytest.raises(DimensionMismatch):
        linked(Ball((0, 0), 1), Box((0,), (1,)))


def test_thick_pair_intersects():
    v = gap_lemma_decide(FIFTHS, Translate(FIFTHS, (F(3, 10),)))
    assert v.tag == "intersect_guaranteed"
    assert v.tau_product == pytest.approx(4)


def test_product_one_is_not_enough():
    c = CentralCantor()
    v = gap_lemma_decide(c, Translate(c, (F(1, 2),)))
    assert v.tag == "hypothesis_fails"
    assert v.which == "thickness-product<=1"


def test_far_translate_lies_in_unbounded_component():
    c = CentralCantor()
    v = gap_lemma_decide(c, Translate(c, (F(3),)))
    assert v.tag == "hypothesis_fails"
    assert v.which == "containment-in-gap"


def test_small_copy_inside_a_gap():
    small = Translate(Explicit(Box((0,), (F(1, 10),))), (F(2, 5),))
    assert containment_in_gap(small, CentralCantor())


def test_shared_endpoint_is_reported():
    c = CentralCantor()
    assert gap_lemma_decide(c, c, find_contact=True).tag == "trivially_intersect"


def test_refine_approaches_both_sets():
    other = Translate(FIFTHS, (F(3, 10),))
    r = linked_refine(FIFTHS, other, eps=1e-9)
    assert r.bound < 1e-9
    for spec in (FIFTHS, other):
        kind, gap = locate(spec, r.point)
        assert kind in ("set", "gap")
        if kind == "gap":
            assert gap.shape.upper[0] - gap.shape.lower[0] < 1e-9


def test_refine_requires_thickness():
    c = CentralCantor()
    with pytest.raises(NotLinkedSets):
        linked_refine(c, Translate(c, (F(1, 2),)))


def test_carpet_against_shifted_copy_is_not_certified():
    s = Sponge((3, 3))
    v = gap_lemma_decide(s, Translate(s, (F(1, 2), F(1, 2))))
    assert v.tag == "hypothesis_fails"
