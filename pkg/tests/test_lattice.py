from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import support
from bilevel_exact import (DEFAULT_CONFIG, BoundednessError, LinearSystem, MixedPattern,
                           QVector, enumerate_integers, integer_min, mixed_feasible,
                           row_eq, row_le, row_lt)


def boxed_systems(dim=2, side=4):
    coeff = st.integers(-3, 3)
    row = st.tuples(st.lists(coeff, min_size=dim, max_size=dim), st.integers(-6, 6))
    def build(rows):
        built = []
        for j in range(dim):
            unit = [0] * dim
            unit[j] = 1
            built.append(row_le(unit, side))
            built.append(row_le([-v for v in unit], side))
        built.extend(row_le(c, r) for c, r in rows)
        return LinearSystem(dim, tuple(built))
    return st.lists(row, max_size=3).map(build)


def test_integer_min_interval():
    s = LinearSystem(1, (row_le([-1], Fraction(-1, 2)), row_le([1], Fraction(5, 2))))
    out = integer_min(QVector([1]), s, config=DEFAULT_CONFIG)
    assert out.tag == "optimal" and out.value == 1 and out.point.entries == (1,)
    out2 = integer_min(QVector([-1]), s, config=DEFAULT_CONFIG)
    assert out2.value == -2 and out2.point.entries == (2,)


def test_integer_min_infeasible_gap():
    # continuous relaxation nonempty but no integer point in (0, 1)
    s = LinearSystem(1, (row_le([-2], -1), row_le([2], 1)))
    assert integer_min(QVector([1]), s, config=DEFAULT_CONFIG).tag == "infeasible"


def test_integer_min_lex_tiebreak():
    box = LinearSystem(2, (row_le([1, 0], 2), row_le([0, 1], 2),
                           row_le([-1, 0], 0), row_le([0, -1], 0)))
    out = integer_min(QVector([0, 0]), box, config=DEFAULT_CONFIG)
    assert out.point.entries == (0, 0)
    # min x - y: value -2 at both (0,2); lex picks x first
    out2 = integer_min(QVector([1, -1]), box, config=DEFAULT_CONFIG)
    assert out2.value == -2 and out2.point.entries == (0, 2)


def test_integer_min_guards():
    with pytest.raises(ValueError):
        integer_min(QVector([1]), LinearSystem(1, (row_lt([1], 1),)), config=DEFAULT_CONFIG)
    with pytest.raises(BoundednessError):
        integer_min(QVector([1]), LinearSystem(1, (row_le([-1], 0),)), config=DEFAULT_CONFIG)


@settings(max_examples=40)
@given(boxed_systems(), st.lists(st.integers(-3, 3), min_size=2, max_size=2))
def test_integer_min_matches_grid_scan(sys_, obj):
    pts = support.brute_integer_points(sys_, -4, 4)
    out = integer_min(QVector(obj), sys_, config=DEFAULT_CONFIG)
    if not pts:
        assert out.tag == "infeasible"
        return
    vals = [sum(o * v for o, v in zip(obj, p)) for p in pts]
    best = min(vals)
    assert out.tag == "optimal" and out.value == best
    lex_best = min(p for p, v in zip(pts, vals) if v == best)
    assert tuple(int(v) for v in out.point.entries) == lex_best


def test_enumerate_integers_interval():
    s = LinearSystem(1, (row_le([-1], Fraction(-1, 2)), row_le([1], Fraction(5, 2))))
    assert [p.entries for p in enumerate_integers(s, DEFAULT_CONFIG)] == [(1,), (2,)]


@settings(max_examples=40)
@given(boxed_systems())
def test_enumerate_integers_matches_grid_scan(sys_):
    got = [tuple(int(v) for v in p.entries) for p in enumerate_integers(sys_, DEFAULT_CONFIG)]
    assert got == support.brute_integer_points(sys_, -4, 4)
    assert got == sorted(got)


def test_mixed_feasible_follower_slice():
    # the bundled example's follower at z = 1/2: integer x with x >= 1/2, 0 <= x <= 1
    s = LinearSystem(1, (row_le([-1], Fraction(-1, 2)), row_le([1], 1), row_le([-1], 0)))
    pt = mixed_feasible(s, MixedPattern.all_integer(1), DEFAULT_CONFIG)
    assert pt is not None and pt.entries == (1,)


def test_mixed_feasible_partial_pattern():
    # x integer, y continuous: x = 1/2 impossible, but (1, 1/2) works
    s = LinearSystem(2, (row_eq([2, 0], 2), row_eq([0, 2], 1)))
    pat = MixedPattern(2, frozenset({0}))
    pt = mixed_feasible(s, pat, DEFAULT_CONFIG)
    assert pt is not None
    assert pt.entries == (1, Fraction(1, 2))
    # forcing the continuous coordinate into the integer set kills it
    assert mixed_feasible(s, MixedPattern.all_integer(2), DEFAULT_CONFIG) is None


@settings(max_examples=40)
@given(boxed_systems())
def test_mixed_feasible_agrees_with_scan(sys_):
    pat = MixedPattern(2, frozenset({0}))
    pt = mixed_feasible(sys_, pat, DEFAULT_CONFIG)
    if pt is not None:
        assert pt[0].denominator == 1
        assert all(support.row_holds(r, pt, closed=True) for r in sys_.rows)
        return
    # completeness: no integer x0 leaves a feasible continuous slice
    for x0 in range(-4, 5):
        slice_sys = sys_.with_rows([row_eq([1, 0], x0)])
        assert support.ref_lp_min(slice_sys, [Fraction(0), Fraction(0)]) is None
