import math
from fractions import Fraction as F

import pytest

from thickset.geometry import Ball, Box
from thickset.sets import CentralCantor, Explicit, Sponge, enumerate_gaps, sponge_cell_box
from thickset.thickness import (central_cantor_thickness, line_section, sponge_ratio,
                                sponge_thickness_closed_form, thickness, thickness_1d, thickness_rd)


@pytest.mark.parametrize("depth", [1, 3, 6])
def test_middle_thirds_has_thickness_one(depth):
    rep = thickness(CentralCantor(), depth)
    assert rep.value == 1
    assert all(r[3] == 1 for r in rep.ratios)


def test_one_gap_interval():
    spec = Explicit(Box((0,), (1,)), (Box((F(2, 5),), (F(3, 5),)),))
    assert thickness(spec, 1).value == pytest.approx(2)


def test_degenerate_cases():
    assert thickness(Explicit(Box((F(1, 2),), (F(1, 2),))), 1).value == 0
    assert thickness(Explicit(Box((0, 0), (1, 1))), 1).value == math.inf


@pytest.mark.parametrize("n", [3, 5, 7])
def test_carpet_generic_matches_closed_form(n):
    rep = thickness(Sponge((n, n)), 2)
    assert rep.value == pytest.approx((n - 1) / (2 * math.sqrt(2)), rel=1e-12)
    assert rep.truncation == "exact"


def test_carpet_depth_five_ratios_never_below_the_limit():
    rep = thickness(Sponge((3, 3)), 5)
    assert min(r[3] for r in rep.ratios) == pytest.approx(1 / math.sqrt(2), rel=1e-12)
    assert all(r[3] >= 1 / math.sqrt(2) - 1e-12 for r in rep.ratios)


def test_ball_gap_in_square():
    spec = Explicit(Box((0, 0), (1, 1)), (Ball((F(1, 2), F(1, 2)), F(1, 10)),))
    assert thickness(spec, 1).value == pytest.approx(2)


def test_closed_forms():
    assert sponge_thickness_closed_form((3, 3)).value == pytest.approx(1 / math.sqrt(2))
    assert sponge_thickness_closed_form((3, 3, 3)).value == pytest.approx(1 / math.sqrt(3))
    mixed = sponge_thickness_closed_form((3, 5))
    assert mixed.value == 0 and mixed.truncation == "limit"
    assert central_cantor_thickness(F(1, 3)) == 1
    assert central_cantor_thickness(F(2, 5)) == 2
    assert central_cantor_thickness(F(1, 1000)) < 0.0011


@pytest.mark.parametrize("k", [3, 4, 5, 6])
def test_mixed_sponge_localized_ratio(k):
    region = sponge_cell_box((3, 5), k - 2, (0, 0))
    rep = thickness(Sponge((3, 5)), k, region=region)
    assert rep.value == pytest.approx(sponge_ratio((3, 5), k), rel=1e-12)
    assert rep.value == pytest.approx(2 * 0.6 ** k / math.sqrt(1 + 0.36 ** k), rel=1e-12)


def test_one_dimensional_rules_agree():
    for spec in (CentralCantor(), CentralCantor(keep_ratio=F(2, 5)),
                 Explicit(Box((0,), (1,)), (Box((F(1, 10),), (F(1, 5),)), Box((F(1, 2),), (F(3, 4),))))):
        e = enumerate_gaps(spec, 5)
        assert thickness_1d(e).value == pytest.approx(thickness_rd(e).value, rel=1e-12)


def test_carpet_midline_section():
    sec = line_section(Sponge((3, 3)), (0, F(1, 2)), (1, 0), depth=4)
    assert thickness_1d(sec).value == pytest.approx(1)
    lengths = sorted({g.diameter for g in sec.gaps}, reverse=True)
    assert lengths[:2] == pytest.approx([1 / 3, 1 / 9])


def test_section_missing_every_gap():
    spec = Explicit(Box((0, 0), (1, 1)), (Ball((F(1, 2), F(1, 2)), F(1, 10)),))
    sec = line_section(spec, (0, F(1, 10)), (1, 0), depth=1)
    assert thickness_1d(sec).value == math.inf


@pytest.mark.parametrize("k", [3, 4])
def test_localized_ratio_equals_global(k):
    region = sponge_cell_box((3, 5), k - 2, (0, 0))
    assert thickness(Sponge((3, 5)), k, region=region).value == thickness(Sponge((3, 5)), k).value
