import math
from fractions import Fraction as F

import pytest

from thickset.errors import DegenerateRange, EmptyAtThisDepth, RasterBudgetExceeded
from thickset.geometry import Ball, Box
from thickset.sets import CentralCantor, Explicit, Sponge, Translate
from thickset.verify import (CertifiedDisjoint, NonemptyWitness, PossiblyEmpty, approximation_intervals,
                             box_counting, brute_intersection, cantor_distance_oracle, in_cantor, in_sponge,
                             pattern_search, rasterize)

CARPET = Sponge((3, 3))


@pytest.mark.parametrize("k", [1, 3, 6])
def test_cantor_raster_counts(k):
    g = rasterize(CentralCantor(), k)
    assert g.count("may") == 2 ** k
    assert g.count("inside") == 2 ** k


@pytest.mark.parametrize("k", [1, 2, 4])
def test_carpet_raster_counts(k):
    assert rasterize(CARPET, k).count("may") == 8 ** k


def _ball_gap_oracle(r, level):
    """Exact cell classification for the unit square minus an open ball at its centre."""
    h = F(1, 2 ** level)
    inside = may = 0
    for i in range(2 ** level):
        for j in range(2 ** level):
            xs, ys = (i * h, (i + 1) * h), (j * h, (j + 1) * h)
            near = sum((min(max(F(1, 2), lo), hi) - F(1, 2)) ** 2 for lo, hi in (xs, ys))
            far = max((x - F(1, 2)) ** 2 for x in xs) + max((y - F(1, 2)) ** 2 for y in ys)
            inside += near >= r * r
            may += far > r * r
    return inside, may


@pytest.mark.parametrize("r", [F(1, 10), F(1, 4)])
def test_square_with_ball_gap_layers(r):
    spec = Explicit(Box((0, 0), (1, 1)), (Ball((F(1, 2), F(1, 2)), r),))
    g = rasterize(spec, 4)
    assert (g.count("inside"), g.count("may")) == _ball_gap_oracle(r, 4)
    assert g.count("inside") <= g.count("may") <= g.count("touch")


def test_raster_budget():
    with pytest.raises(RasterBudgetExceeded):
        rasterize(CARPET, 8, max_cells=1000)


def test_approximation_intervals():
    assert approximation_intervals(CentralCantor(), 1) == [(0, F(1, 3)), (F(2, 3), 1)]


def test_box_counting_carpet():
    est = box_counting(CARPET, range(1, 8))
    assert est.slope == pytest.approx(math.log(8) / math.log(3), abs=1e-9)


def test_box_counting_solid_and_cantor():
    assert box_counting(Explicit(Box((0, 0), (1, 1))), range(1, 6)).slope == pytest.approx(2)
    assert box_counting(CentralCantor(), range(2, 10)).slope == pytest.approx(math.log(2) / math.log(3), abs=1e-9)


def test_box_counting_needs_four_levels():
    with pytest.raises(DegenerateRange):
        box_counting(CARPET, [1, 2, 3])


def test_intersection_verdicts():
    c = CentralCantor()
    assert isinstance(brute_intersection([c, c], 5), NonemptyWitness)
    far = Translate(c, (F(3),))
    assert isinstance(brute_intersection([c, far], 5), CertifiedDisjoint)
    inner = Translate(Explicit(Box((0,), (F(1, 10),))), (F(2, 5),))
    assert isinstance(brute_intersection([c, inner], 6), CertifiedDisjoint)


def test_intersection_possibly_empty_on_coarse_grid():
    c = CentralCantor()
    shifted = Translate(c, (F(1, 2),))
    assert isinstance(brute_intersection([c, shifted], 1), (PossiblyEmpty, NonemptyWitness))


def test_carpet_patterns_pass_digit_membership():
    for pattern in ([(0, 0), (1, 0)], [(0, 0), (1, 0), (2, 0)], [(0, 0), (1, 0), (0, 1)]):
        found = pattern_search(CARPET, pattern, F(1, 9), 4, limit=50)
        assert found
        for w in found:
            assert all(in_sponge(pt, (3, 3)) for pt in w.points)


def test_pattern_search_theorem_mode_range():
    with pytest.raises(ValueError):
        pattern_search(CARPET, [(0, 0), (1, 0)], F(1, 3), 3, theorem_mode=True)


def test_pattern_search_can_come_up_empty():
    with pytest.raises(EmptyAtThisDepth):
        pattern_search(CentralCantor(), [(0,), (F(1, 2),)], F(1, 1), 3)


def test_digit_oracles():
    assert in_sponge((F(1, 3), F(1, 2)), (3, 3))
    assert not in_sponge((F(1, 2), F(1, 2)), (3, 3))
    assert in_sponge((F(1, 4), F(3, 4)), (3, 3))  # 0.0202..., 0.2020... in base 3
    assert in_cantor(F(1, 4))
    assert not in_cantor(F(1, 2))
    assert cantor_distance_oracle(F(1, 2)) == pytest.approx(1 / 6)
    assert cantor_distance_oracle(F(1, 4)) == 0
