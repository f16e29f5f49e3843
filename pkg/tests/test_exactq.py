from __future__ import annotations

from fractions import Fraction as Q

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bnloci.exactq import (
    DomainError,
    PiecewiseFn,
    PointAtom,
    Quadratic,
    Segment,
    pw_max,
    quad_max_on_interval,
    rat_ceil,
    rat_floor,
)

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)


def test_rat_floor_ceil_basics():
    assert rat_floor(Q(7, 2)) == 3
    assert rat_floor(Q(-7, 2)) == -4
    assert rat_ceil(Q(7, 2)) == 4
    assert rat_ceil(Q(-7, 2)) == -3
    assert rat_floor(5) == rat_ceil(5) == 5


@given(rationals)
def test_floor_ceil_sandwich(x):
    assert rat_floor(x) <= x <= rat_ceil(x)
    assert x - rat_floor(x) < 1
    assert rat_ceil(x) - x < 1


def test_quadratic_eval_and_product():
    q = Quadratic(Q(1), Q(-3), Q(2))
    assert q(0) == 2
    assert q(Q(3, 2)) == Q(-1, 4)
    p = Quadratic.from_affine_product(Q(1, 10), Q(1), Q(-1, 10), Q(11, 10))
    # (1 + t/10)(1 + (1-t)/10)
    assert p(Q(1, 2)) == Q(441, 400)


def test_quad_max_concave_vertex():
    # (1 + t/10)(1 + (1-t)/10) on [0, 1]: vertex at t = 1/2
    q = Quadratic.from_affine_product(Q(1, 10), Q(1), Q(-1, 10), Q(11, 10))
    argmax, val = quad_max_on_interval(q, 0, 1)
    assert (argmax, val) == (Q(1, 2), Q(441, 400))


def test_quad_max_vertex_outside():
    # -t^2 + 11 t - 7 on [9, 13]: vertex 11/2 lies left of the interval
    q = Quadratic(Q(-1), Q(11), Q(-7))
    argmax, val = quad_max_on_interval(q, 9, 13)
    assert (argmax, val) == (Q(9), Q(11))


def test_quad_max_affine():
    q = Quadratic(Q(0), Q(1), Q(0))
    assert quad_max_on_interval(q, 0, 2) == (Q(2), Q(2))


def test_quad_max_tie_prefers_smaller_arg():
    # symmetric convex parabola: both endpoints attain the max
    q = Quadratic(Q(1), Q(0), Q(0))
    assert quad_max_on_interval(q, -2, 2) == (Q(-2), Q(4))


def test_quad_max_empty_interval_rejected():
    with pytest.raises(ValueError):
        quad_max_on_interval(Quadratic(Q(1), Q(0), Q(0)), 1, 0)


@given(st.fractions(min_value=-5, max_value=5, max_denominator=8),
       st.fractions(min_value=-5, max_value=5, max_denominator=8),
       st.fractions(min_value=-5, max_value=5, max_denominator=8))
def test_quad_max_dominates_brute_scan(a, b, c):
    q = Quadratic(a, b, c)
    lo, hi = Q(-2), Q(3)
    argmax, val = quad_max_on_interval(q, lo, hi)
    assert q(argmax) == val
    step = Q(hi - lo, 1024)
    for i in range(1025):
        assert q(lo + i * step) <= val


def _step_fn() -> PiecewiseFn:
    return PiecewiseFn([
        Segment(Q(0), Q(0), True, True, Q(0), Q(5)),
        Segment(Q(0), Q(1), False, True, Q(1), Q(0)),
        Segment(Q(1), Q(3), False, True, Q(0), Q(2)),
    ])


def test_piecewise_eval_respects_closures():
    f = _step_fn()
    assert f(0) == 5
    assert f(Q(1, 2)) == Q(1, 2)
    assert f(1) == 1
    assert f(Q(5, 2)) == 2
    assert f(3) == 2


def test_piecewise_domain_errors():
    f = _step_fn()
    with pytest.raises(DomainError):
        f(Q(-1, 2))
    with pytest.raises(DomainError):
        f(Q(7, 2))


def test_piecewise_rejects_overlap():
    with pytest.raises(ValueError):
        PiecewiseFn([
            Segment(Q(0), Q(2), True, True, Q(0), Q(0)),
            Segment(Q(1), Q(3), True, True, Q(0), Q(0)),
        ])


def test_piecewise_rejects_gap():
    with pytest.raises(ValueError):
        PiecewiseFn([
            Segment(Q(0), Q(1), True, True, Q(0), Q(0)),
            Segment(Q(2), Q(3), True, True, Q(0), Q(0)),
        ])


def test_piecewise_rejects_doubly_carried_junction():
    with pytest.raises(ValueError):
        PiecewiseFn([
            Segment(Q(0), Q(1), True, True, Q(0), Q(0)),
            Segment(Q(1), Q(2), True, True, Q(0), Q(0)),
        ])


def test_piecewise_rejects_uncarried_junction():
    with pytest.raises(ValueError):
        PiecewiseFn([
            Segment(Q(0), Q(1), True, False, Q(0), Q(0)),
            Segment(Q(1), Q(2), False, True, Q(0), Q(0)),
        ])


def test_point_segment_must_be_closed():
    with pytest.raises(ValueError):
        Segment(Q(1), Q(1), True, False, Q(0), Q(0))


def test_atoms_roundtrip_values():
    f = _step_fn()
    atoms = list(f.atoms())
    points = [a for a in atoms if isinstance(a, PointAtom)]
    assert {(a.x, a.value) for a in points} == {(Q(0), Q(5)), (Q(1), Q(1)), (Q(3), Q(2))}


def test_pw_max_with_crossing():
    # f(x) = x and g(x) = 2 - x on [0, 2] cross at x = 1
    f = PiecewiseFn([Segment(Q(0), Q(2), True, True, Q(1), Q(0))])
    g = PiecewiseFn([Segment(Q(0), Q(2), True, True, Q(-1), Q(2))])
    h = pw_max(f, g)
    assert h(0) == 2
    assert h(1) == 1
    assert h(Q(1, 2)) == Q(3, 2)
    assert h(Q(3, 2)) == Q(3, 2)
    assert h(2) == 2
    assert Q(1) in h.breakpoints()


def test_pw_max_requires_same_domain():
    f = PiecewiseFn([Segment(Q(0), Q(1), True, True, Q(0), Q(0))])
    g = PiecewiseFn([Segment(Q(0), Q(2), True, True, Q(0), Q(0))])
    with pytest.raises(ValueError):
        pw_max(f, g)


@given(st.lists(st.fractions(min_value=0, max_value=4, max_denominator=16),
                min_size=2, max_size=6, unique=True),
       st.data())
def test_pw_max_matches_pointwise_scan(cuts, data):
    cuts = sorted(cuts)
    segs_f, segs_g = [], []
    for i, (u, v) in enumerate(zip(cuts, cuts[1:])):
        sf = data.draw(st.fractions(min_value=-3, max_value=3, max_denominator=8))
        bf = data.draw(st.fractions(min_value=-3, max_value=3, max_denominator=8))
        sg = data.draw(st.fractions(min_value=-3, max_value=3, max_denominator=8))
        bg = data.draw(st.fractions(min_value=-3, max_value=3, max_denominator=8))
        first = i == 0
        segs_f.append(Segment(u, v, first, True, sf, bf))
        segs_g.append(Segment(u, v, first, True, sg, bg))
    f, g = PiecewiseFn(segs_f), PiecewiseFn(segs_g)
    h = pw_max(f, g)
    lo, hi = cuts[0], cuts[-1]
    step = Q(hi - lo, 64)
    for i in range(65):
        x = lo + i * step
        assert h(x) == max(f(x), g(x))
