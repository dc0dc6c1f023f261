from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from randlab.cauchy import const_name
from randlab.errors import CoverViolation, ExtensionUndefined
from randlab.intervals import RationalInterval
from randlab.markov import (
    StagedCover,
    abs_offset_fn,
    canonical_nonuc,
    check_H,
    cover_intervals,
    eval_extension,
    function_by_name,
    identity_fn,
    oscillation_tree,
    polygonal_fn,
    slope_bounds_check,
    square_fn,
    truncate,
)

unit = st.fractions(min_value=0, max_value=1, max_denominator=2**10)

HALF_COVER = StagedCover(
    stages=((RationalInterval(Fraction(0), Fraction(1, 2)),),),
    size_bound=(0,),
)


def tent_interval(n: int) -> RationalInterval:
    return RationalInterval(1 - Fraction(1, 2**n), 1 - Fraction(3, 2 ** (n + 2)))


@given(unit)
def test_square_matches_oracle(x):
    assert square_fn()(x) == x * x


@given(unit)
def test_abs_offset_matches_oracle(x):
    assert abs_offset_fn()(x) == abs(x - Fraction(1, 2))


def test_polygonal_interpolates():
    f = polygonal_fn([(Fraction(0), Fraction(0)), (Fraction(1, 2), Fraction(1)), (Fraction(1), Fraction(0))])
    assert f(Fraction(1, 4)) == Fraction(1, 2)
    assert f(Fraction(3, 4)) == Fraction(1, 2)
    assert f.range_on(Fraction(0), Fraction(1)) == (Fraction(0), Fraction(1))


def test_nonuc_tent_geometry():
    # covers have length 2^{-n-2} and approach 1 without reaching it
    f = canonical_nonuc(12)
    for n in range(12):
        iv = tent_interval(n)
        assert iv.length == Fraction(1, 2 ** (n + 2))
        assert f(iv.lo) == 0 and f(iv.hi) == 0
        assert f((iv.lo + iv.hi) / 2) == n
    assert f(Fraction(1)) == 0


@given(st.integers(0, 11), unit)
def test_nonuc_vanishes_outside_covers(n, t):
    f = canonical_nonuc(12)
    covers = [tent_interval(k) for k in range(12)]
    x = t
    if not any(c.contains(x) for c in covers):
        assert f(x) == 0


def test_nonuc_range_is_exact():
    f = canonical_nonuc(8)
    lo, hi = f.range_on(Fraction(0), Fraction(1))
    assert lo == 0 and hi == 7


def test_check_H_accepts_disjoint_tents():
    f = canonical_nonuc(10)
    stages = tuple((iv,) for iv, _ in cover_intervals(f))
    c = StagedCover(stages=stages, size_bound=tuple(range(len(stages))))
    assert check_H(c).ok


def test_check_H_rejects_overlap():
    c = StagedCover(
        stages=(
            (RationalInterval(Fraction(0), Fraction(1, 2)),),
            (RationalInterval(Fraction(1, 4), Fraction(3, 4)),),
        ),
        size_bound=(0, 0),
    )
    rep = check_H(c)
    assert not rep.ok and "overlap" in rep.violation


def test_check_H_rejects_late_big_interval():
    c = StagedCover(
        stages=((), (RationalInterval(Fraction(0), Fraction(3, 4)),)),
        size_bound=(0, 0),
    )
    assert not check_H(c).ok


def test_truncation_linear_inside_cover():
    g = truncate(square_fn(), HALF_COVER)
    # chord from (0,0) to (1/2,1/4) has slope 1/2
    assert g(Fraction(1, 4)) == Fraction(1, 8)
    assert g(Fraction(1, 8)) == Fraction(1, 16)


@given(st.fractions(min_value=Fraction(1, 2), max_value=1, max_denominator=2**10))
def test_truncation_identity_outside_cover(x):
    g = truncate(square_fn(), HALF_COVER)
    assert g(x) == x * x


def test_truncation_rejects_bad_cover():
    c = StagedCover(
        stages=(
            (RationalInterval(Fraction(0), Fraction(1, 2)),),
            (RationalInterval(Fraction(1, 4), Fraction(3, 4)),),
        ),
        size_bound=(0, 0),
    )
    with pytest.raises(CoverViolation):
        truncate(square_fn(), c)


def test_slope_bounds_clauses():
    v = slope_bounds_check(square_fn(), HALF_COVER, Fraction(1, 4), Fraction(2), 10)
    assert v.passed and v.lower_clause_ok and v.upper_clause_ok
    # w = 1/2 makes the lower clause fail: (1/2)(1/2 - 0) is not < 1/4 - 0
    v2 = slope_bounds_check(square_fn(), HALF_COVER, Fraction(1, 2), Fraction(2), 10)
    assert not v2.lower_clause_ok
    # z = 1 bounds no slope near 1
    v3 = slope_bounds_check(square_fn(), HALF_COVER, Fraction(1, 4), Fraction(1), 10)
    assert not v3.upper_clause_ok


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 3), st.integers(2, 8))
def test_oscillation_tree_downward_closed(n, depth):
    tree = oscillation_tree(canonical_nonuc(12), n, depth)
    assert all(s[:-1] in tree for s in tree if s)


def test_oscillation_tree_identity_stops_at_resolution():
    # the identity moves by less than 2^-3 inside any cylinder of length 2^-3
    for depth in range(3, 10):
        tree = oscillation_tree(identity_fn(), 3, depth)
        assert all(len(s) < 3 for s in tree)


def test_oscillation_tree_nonuc_survives():
    tree = oscillation_tree(canonical_nonuc(20), 0, 12)
    assert any(len(s) == 12 for s in tree)


def test_eval_extension_certified_with_modulus():
    r = eval_extension(square_fn(), const_name(Fraction(1, 3)), 10)
    assert r.certified
    assert r.interval.contains(Fraction(1, 9))
    assert r.interval.length <= Fraction(4, 2**10)


def test_eval_extension_nonuc_defined_point():
    r = eval_extension(canonical_nonuc(20), const_name(Fraction(1, 3)), 8)
    assert r.interval.contains(Fraction(0))
    assert r.interval.length <= Fraction(4, 2**8)


def test_eval_extension_undefined_at_limit_point():
    with pytest.raises(ExtensionUndefined):
        eval_extension(canonical_nonuc(20), const_name(Fraction(1)), 8)


def test_function_registry():
    assert function_by_name("identity")(Fraction(1, 3)) == Fraction(1, 3)
    assert function_by_name("const:2/3")(Fraction(1, 5)) == Fraction(2, 3)
    assert function_by_name("canonical_nonuc:8")(Fraction(1)) == 0
    with pytest.raises(ValueError):
        function_by_name("no_such_function")
