"""Property tests for the invariants the modules promise."""
import math
from fractions import Fraction as F

from hypothesis import assume, given, settings
from hypothesis import strategies as st

from thickset import geometry as geo
from thickset.bounds import dim_lower_1d, intersection_bound, pattern_capacity
from thickset.game import GameParams, Pass, RandomLegal, legal_budget, play_match
from thickset.gaplemma import gap_lemma_decide
from thickset.geometry import Ball, Box
from thickset.sets import CentralCantor, Explicit, Scale, Sponge, Translate, from_dict, to_dict
from thickset.thickness import central_cantor_thickness, thickness
from thickset.verify import CertifiedDisjoint, brute_intersection, in_cantor, in_sponge, rasterize

small = st.fractions(min_value=-5, max_value=5, max_denominator=64)
positive = st.fractions(min_value=F(1, 64), max_value=4, max_denominator=64)
keep = st.fractions(min_value=F(17, 50), max_value=F(49, 100), max_denominator=100)


@st.composite
def boxes(draw, d=2):
    lo = [draw(small) for _ in range(d)]
    return Box(tuple(lo), tuple(x + draw(positive) for x in lo))


@st.composite
def balls(draw, d=2):
    return Ball(tuple(draw(small) for _ in range(d)), draw(positive))


shapes = st.one_of(boxes(), balls())


@given(shapes, shapes)
def test_distance_is_symmetric_and_nonnegative(a, b):
    dab, dba = geo.distance(a, b), geo.distance(b, a)
    assert dab >= 0
    assert math.isclose(dab, dba, rel_tol=1e-12, abs_tol=1e-15)


@given(shapes, shapes, st.fractions(min_value=F(1, 8), max_value=8, max_denominator=16), small, small)
def test_distance_scales_with_homotheties(a, b, lam, ox, oy):
    off = (ox, oy)
    moved = geo.distance(geo.transform(a, lam, off), geo.transform(b, lam, off))
    assert math.isclose(moved, float(lam) * geo.distance(a, b), rel_tol=1e-12, abs_tol=1e-12)


@given(shapes, shapes)
def test_distance_zero_iff_closures_meet(a, b):
    assert (geo.distance(a, b) == 0) == (not geo.closures_disjoint(a, b))


@given(keep)
def test_cantor_thickness_matches_closed_form(r):
    rep = thickness(CentralCantor(keep_ratio=r), 4)
    assert math.isclose(rep.value, float(r / (1 - 2 * r)), rel_tol=1e-12)
    assert math.isclose(central_cantor_thickness(r), float(r / (1 - 2 * r)), rel_tol=1e-12)


@given(keep, st.fractions(min_value=F(1, 10), max_value=10, max_denominator=20), small)
@settings(max_examples=40)
def test_thickness_is_homothety_invariant(r, lam, off):
    base = CentralCantor(keep_ratio=r)
    moved = Translate(Scale(base, lam), (off,))
    assert math.isclose(thickness(moved, 4).value, thickness(base, 4).value, rel_tol=1e-12)


@given(st.sampled_from([3, 5, 7]), st.fractions(min_value=F(1, 4), max_value=4, max_denominator=8))
@settings(max_examples=15)
def test_carpet_thickness_is_scale_invariant(n, lam):
    assert math.isclose(thickness(Scale(Sponge((n, n)), lam), 2).value, (n - 1) / (2 * math.sqrt(2)), rel_tol=1e-12)


@given(st.floats(min_value=1e-6, max_value=1e6), st.floats(min_value=1e-6, max_value=1e6))
def test_dim_lower_1d_is_monotone_and_bounded(t1, t2):
    lo, hi = sorted((t1, t2))
    assert 0 < dim_lower_1d(lo) <= dim_lower_1d(hi) < 1 or hi == lo


@given(st.floats(min_value=10, max_value=1e12), st.floats(min_value=1.0001, max_value=100),
       st.floats(min_value=0.05, max_value=0.95), st.sampled_from([1, 2, 3]))
def test_intersection_bound_grows_with_thickness(tau, factor, cfrac, d):
    c = cfrac * d
    a = intersection_bound([tau], 1, 1, d, c)
    b = intersection_bound([tau * factor], 1, 1, d, c)
    assert b.value >= a.value
    assert not (a.feasible and not b.feasible)


@given(st.floats(min_value=math.e, max_value=1e6), st.floats(min_value=1, max_value=1e3))
def test_capacity_is_monotone_past_e(tau, factor):
    assert pattern_capacity(tau * factor, 1, 1, 2).N >= pattern_capacity(tau, 1, 1, 2).N


@given(st.lists(st.fractions(min_value=F(1, 1000), max_value=1, max_denominator=1000), min_size=1, max_size=4),
       st.fractions(min_value=F(1, 2), max_value=1, max_denominator=10),
       st.sampled_from([F(1, 4), F(1, 2), F(1)]))
def test_shrinking_erased_sets_keeps_them_legal(diams, shrink, c):
    sets = [Box((0,), (x,)) for x in diams]
    smaller = [Box((0,), (x * shrink,)) for x in diams]
    alpha = sum(float(x) ** float(c) for x in diams) ** (1 / float(c))
    if legal_budget(sets, alpha, c, 1):
        assert legal_budget(smaller, alpha, c, 1)


@given(st.integers(min_value=0, max_value=10_000), st.fractions(min_value=F(1, 10), max_value=F(1, 2), max_denominator=20))
@settings(max_examples=25, deadline=None)
def test_random_bob_is_always_legal(seed, beta):
    params = GameParams(alpha=F(1, 10), beta=beta, c=0, rho=1)
    state, verdict = play_match(Pass(), RandomLegal(seed), params, 1e-4)
    assert verdict.tag == "not_in_S"
    radii = [t.bob.radius for t in state.turns]
    assert all(b >= beta * a for a, b in zip(radii, radii[1:]))


@given(keep, keep, st.fractions(min_value=F(-9, 10), max_value=F(9, 10), max_denominator=1000))
@settings(max_examples=40, deadline=None)
def test_guaranteed_intersections_never_look_disjoint(r1, r2, off):
    c1, c2 = CentralCantor(keep_ratio=r1), Translate(CentralCantor(keep_ratio=r2), (off,))
    if gap_lemma_decide(c1, c2).tag == "intersect_guaranteed":
        assert not isinstance(brute_intersection([c1, c2], 8), CertifiedDisjoint)


@given(st.integers(min_value=1, max_value=4), st.data())
@settings(max_examples=30)
def test_inside_cells_have_corners_in_the_carpet(level, data):
    cells = sorted(rasterize(Sponge((3, 3)), level).cells("inside"))
    cell = data.draw(st.sampled_from(cells))
    h = F(1, 3 ** level)
    for dx in (0, 1):
        for dy in (0, 1):
            assert in_sponge(((cell[0] + dx) * h, (cell[1] + dy) * h), (3, 3))


@given(st.integers(min_value=1, max_value=8), st.data())
@settings(max_examples=30)
def test_cantor_inside_cells_are_in_the_set(level, data):
    cells = sorted(rasterize(CentralCantor(), level).cells("inside"))
    (i,) = data.draw(st.sampled_from(cells))
    assert in_cantor(F(i, 3 ** level)) and in_cantor(F(i + 1, 3 ** level))


@given(st.one_of(
    keep.map(lambda r: CentralCantor(keep_ratio=r)),
    st.sampled_from([Sponge((3, 3)), Sponge((3, 5)), Sponge((5, 5, 5))]),
    st.builds(lambda b: Explicit(Box((-10, -10), (10, 10)), (b,)), balls()),
), small, positive)
def test_descriptors_roundtrip(spec, off, lam):
    moved = Translate(Scale(spec, lam), tuple(off for _ in range(spec.dim)))
    assert from_dict(to_dict(moved)) == moved
