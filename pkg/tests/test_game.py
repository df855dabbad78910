from fractions import Fraction as F

import pytest

from thickset.errors import (BudgetExceeded, ExponentBudgetExceeded, IllegalMove, IllegalRadius,
                             MultipleSetsAtCZero, NotNested)
from thickset.game import (CenterEraser, ConcentricShrink, GameParams, GameState, GapChaser, Pass, RandomLegal,
                           ThicknessStrategy, UnionStrategy, budget_used, conjugate_strategy,
                           distance_to_winning_set, legal_budget, play_match, read_trace, referee_alice,
                           referee_bob, replay, write_trace)
from thickset.geometry import Ball, Box
from thickset.sets import CentralCantor

FIFTHS = CentralCantor(keep_ratio=F(2, 5))
PARAMS = GameParams(alpha=2, beta=F(1, 4), c=0, rho=F(1, 8))


def _start(params=PARAMS):
    state = GameState(params)
    referee_bob(state, Ball((F(1, 2),), F(1, 8)))
    return state


def test_first_ball_radius_at_least_rho():
    with pytest.raises(IllegalRadius):
        referee_bob(GameState(PARAMS), Ball((0,), F(1, 16)))


def test_radius_shrinks_by_at_most_beta():
    state = _start()
    referee_alice(state, [])
    with pytest.raises(IllegalRadius):
        referee_bob(state, Ball((F(1, 2),), F(1, 64)))


def test_nesting_enforced():
    state = _start()
    referee_alice(state, [])
    with pytest.raises(NotNested):
        referee_bob(state, Ball((F(3, 5),), F(1, 16)))
    referee_bob(state, Ball((F(9, 16),), F(1, 16)))


def test_turn_order():
    state = _start()
    with pytest.raises(IllegalMove):
        referee_bob(state, Ball((F(1, 2),), F(1, 16)))


def test_c_zero_budget_is_a_single_diameter():
    # alpha * rho_m = 1/4
    state = _start()
    with pytest.raises(BudgetExceeded):
        referee_alice(state, [Box((0,), (F(3, 10),))])
    with pytest.raises(MultipleSetsAtCZero):
        referee_alice(_start(), [Box((0,), (F(1, 10),)), Box((F(1, 5),), (F(3, 10),))])
    referee_alice(_start(), [Box((0,), (F(1, 4),))])


def test_positive_c_budget():
    shapes = [Box((0,), (F(1, 4),)), Box((F(1, 2),), (F(3, 4),))]
    assert budget_used(shapes, 0.5) == pytest.approx(1.0)
    assert legal_budget(shapes, 1, 0.5, 1)
    assert not legal_budget(shapes, F(9, 10), 0.5, 1)
    assert budget_used(shapes, 0) == 0.25


def test_union_needs_room_in_the_exponent_budget():
    UnionStrategy([(Pass(), 0.5), (Pass(), 0.5)], 1, 1)
    with pytest.raises(ExponentBudgetExceeded):
        UnionStrategy([(Pass(), 0.6), (Pass(), 0.6)], 1, 1)
    with pytest.raises(ExponentBudgetExceeded):
        UnionStrategy([(Pass(), 0.1)], 1, 0)


def test_conjugation_transports_the_erased_sets():
    params = GameParams(alpha=1, beta=F(1, 4), c=0, rho=2)
    state = GameState(params)
    referee_bob(state, Ball((F(7),), 2))
    moved = conjugate_strategy(CenterEraser(), 2, (F(5),))
    (erased,) = moved.move(state)
    assert erased.center == (7,)
    assert erased.diameter_sq() == pytest.approx(4)
    assert conjugate_strategy(Pass(), 1, (0,)).__class__ is Pass


def test_pass_loses_when_bob_aims_at_a_gap():
    state, verdict = play_match(Pass(), ConcentricShrink((F(1, 2),)), PARAMS, 1e-6, target=FIFTHS)
    assert verdict.tag == "not_in_S"
    assert verdict.dist_to_S > 0.09


def test_center_eraser_always_erases_the_outcome():
    for seed in range(5):
        _, verdict = play_match(CenterEraser(), RandomLegal(seed), PARAMS, 1e-6, target=FIFTHS)
        assert verdict.tag == "erased"


def test_thickness_strategy_triggers_and_logs():
    alice = ThicknessStrategy(FIFTHS)
    _, verdict = play_match(alice, ConcentricShrink((F(1, 2),)), PARAMS, 1e-6, target=FIFTHS)
    assert alice.log
    assert verdict.tag == "erased"


def test_matches_are_seeded():
    runs = [play_match(ThicknessStrategy(FIFTHS), GapChaser(FIFTHS, 3), PARAMS, 1e-6, target=FIFTHS)[1]
            for _ in range(2)]
    assert runs[0] == runs[1]


def test_distance_to_winning_set():
    assert distance_to_winning_set(FIFTHS, (F(1, 2),)) == pytest.approx(0.1)
    assert distance_to_winning_set(FIFTHS, (F(2, 5),)) == 0
    assert distance_to_winning_set(FIFTHS, (F(5),)) == 0


def test_trace_roundtrip(tmp_path):
    state, _ = play_match(ThicknessStrategy(FIFTHS), GapChaser(FIFTHS, 1), PARAMS, 1e-4, target=FIFTHS)
    path = tmp_path / "trace.jsonl"
    write_trace(state, path)
    turns = read_trace(path)
    assert len(turns) == len(state.turns)
    replay(turns, PARAMS)
    with pytest.raises(IllegalMove):
        replay(turns, GameParams(alpha=F(1, 1000), beta=F(1, 4), c=0, rho=F(1, 8)))
