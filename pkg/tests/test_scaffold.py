from fractions import Fraction as F

import pytest

from thickset.errors import InfeasibleParams, MissingHistory, SurvivorShortfall
from thickset.game import CenterEraser, Pass, ThicknessStrategy
from thickset.scaffold import (History, LatticeBall, build_scaffold, chain, check_claims_i_ii_iii, check_projection,
                               cover_bound, d_ball, desk_params, emit_jsonl, gamma_for_dimension,
                               half_ball_children, make_params, phi_from_levels, potential_phi, project_pi,
                               scaffold_dimension, survivor_bound, verify_tree)
from thickset.sets import CentralCantor

DESK = desk_params(F(1, 864), F(1, 2), x0=(F(1, 5),))


def test_gamma_values():
    assert gamma_for_dimension(1) == F(1, 432)
    assert gamma_for_dimension(2) == pytest.approx(0.0044417, rel=1e-4)
    assert gamma_for_dimension(3) == pytest.approx(0.0045537, rel=1e-4)


def test_desk_parameters():
    assert DESK.N == 2 and DESK.M == 1
    assert not DESK.feasible
    assert cover_bound(DESK) == 2
    assert survivor_bound(DESK) == pytest.approx(1, abs=0.1)


def test_make_params_rejects_infeasible():
    with pytest.raises(InfeasibleParams):
        make_params(1, F(1, 1000), F(1, 4), F(1, 2))


def test_make_params_feasible():
    p = make_params(1, 1e-12, F(1, 4), F(1, 2))
    assert p.feasible
    assert p.N == int((1 / 432) / 1e-12)


def test_children_of_a_desk_node():
    root = LatticeBall(0, (0,))
    kids = half_ball_children(root, DESK)
    assert len(kids) == 5
    assert all(k.level == 2 for k in kids)


@pytest.mark.parametrize("parent", [d_ball(0, (0,)), d_ball(2, (5,)), d_ball(4, (-3,))])
def test_projection_returns_the_parent(parent):
    assert check_projection(parent, DESK) > 0


def test_chain_starts_at_the_root():
    ball = LatticeBall(4, (37,))
    ch = chain(ball, DESK)
    assert ch[-1] == ball
    assert [b.level for b in ch] == list(range(5))
    assert project_pi(ball, DESK) == ch[-2]


@pytest.mark.parametrize("alice", [Pass(), ThicknessStrategy(CentralCantor())])
def test_depth_three_tree_checks(alice):
    root = build_scaffold(DESK, alice, 3, keep=10)
    report = verify_tree(root, DESK)
    assert report.ok
    assert report.nodes == 156


def test_center_eraser_starves_an_infeasible_desk():
    with pytest.raises(SurvivorShortfall):
        build_scaffold(DESK, CenterEraser(), 2)


def test_desk_claims_fail():
    rep = check_claims_i_ii_iii(DESK)
    assert rep.holds["i"]
    assert not rep.holds["ii"] and not rep.holds["iii"]


def test_potential_needs_history():
    hist = History(DESK, Pass())
    ball = LatticeBall(2, (3,))
    assert potential_phi(ball, hist) == 0
    with pytest.raises(MissingHistory):
        phi_from_levels(ball, [[]], DESK)


def test_emit(tmp_path):
    root = build_scaffold(DESK, Pass(), 2, keep=2)
    rows = emit_jsonl(root, tmp_path / "tree.jsonl")
    assert rows == sum(len(n.candidates) for n in root.walk())


def test_dimension_needs_feasible_parameters():
    with pytest.raises(InfeasibleParams):
        scaffold_dimension(DESK)
    dim = scaffold_dimension(make_params(1, 1e-12, F(1, 4), F(1, 2)))
    assert dim.construction == pytest.approx(1, abs=1e-8)
    assert dim.closed_form == pytest.approx(1, abs=1e-9)


def test_dimension_deficits_at_d1():
    # M = ceil(4^N / 16) and N = gamma / alpha give a deficit of 2 / N = 864 alpha;
    # the closed form allows K1 alpha / log 4 = 192 alpha
    dim = scaffold_dimension(make_params(1, 1e-12, F(1, 4), F(1, 2)))
    assert dim.construction_deficit == pytest.approx(864e-12, rel=1e-6)
    assert dim.closed_form_deficit == pytest.approx(192e-12, rel=1e-9)
    assert not dim.holds
