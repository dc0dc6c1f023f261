from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from randlab.cauchy import const_name, scripted_name
from randlab.errors import (
    BudgetExceeded,
    MeasureBoundViolation,
    NotPrefixFree,
)
from randlab.intervals import RationalInterval, normalize_union
from randlab.randomness import (
    TestFamily,
    TestKind,
    VerdictResult,
    build_hop_sets,
    build_pi1_ml_test,
    convert_solovay_to_ml,
    demuth_update,
    evaluate,
    interval_sequence_to_schnorr,
    schnorr_to_interval_sequence,
    validate,
)
from randlab.ttmeasures import LimitOracle


def geometric(m: int):
    return normalize_union([RationalInterval(Fraction(0), Fraction(1, 2**m), True, True)])


def ml_geometric(max_m: int = 8) -> TestFamily:
    return TestFamily(TestKind.ML, {m: [geometric(m)] for m in range(max_m + 1)})


def test_validate_ml_geometric_passes():
    rep = validate(ml_geometric())
    assert rep.passed


def test_validate_catches_fat_component():
    t = TestFamily(TestKind.ML, {3: [geometric(1)]})
    rep = validate(t)
    assert not rep.passed
    fail = rep.first_failure()
    assert "1/2" in fail.detail and "1/8" in fail.detail


def test_every_schnorr_test_is_an_ml_test():
    t = TestFamily(
        TestKind.SCHNORR,
        {m: [geometric(m)] for m in range(9)},
        {"declared_measures": {m: Fraction(1, 2**m) for m in range(9)}},
    )
    assert validate(t).passed
    assert validate(t, as_kind=TestKind.ML).passed


def test_schnorr_declared_mismatch_fails():
    t = TestFamily(
        TestKind.SCHNORR,
        {1: [geometric(1)]},
        {"declared_measures": {1: Fraction(1, 4)}},
    )
    rep = validate(t)
    assert not rep.passed
    assert "1/4" in rep.first_failure().detail


def test_solovay_running_sum_bound():
    t = TestFamily(
        TestKind.SOLOVAY,
        {m: [geometric(m)] for m in range(1, 9)},
        {"total_bound": Fraction(1)},
    )
    assert validate(t).passed
    tight = TestFamily(
        TestKind.SOLOVAY,
        {m: [geometric(0)] for m in range(1, 3)},
        {"total_bound": Fraction(1)},
    )
    assert not validate(tight).passed


def test_exact_membership_fast_path():
    t = ml_geometric()
    inside = evaluate(t, const_name(Fraction(1, 2**10)), 6)
    assert inside.captured == tuple(range(7))
    outside = evaluate(t, const_name(Fraction(3, 4)), 6)
    assert outside.captured == (0,)
    assert outside.escaped == tuple(range(1, 7))


def test_open_endpoint_escapes_exactly():
    # 2^-m is the open right endpoint of (0, 2^-m)
    t = ml_geometric()
    s = evaluate(t, const_name(Fraction(1, 4)), 6)
    assert 1 in s.captured and 2 in s.escaped


def test_window_refinement_capture():
    t = ml_geometric()
    z = scripted_name([Fraction(1, 2**10) + Fraction(1, 2 ** (p + 3)) for p in range(48)], "drift")
    s = evaluate(t, z, 6)
    assert s.captured == tuple(range(7))


def test_undecidable_boundary_point_stays_undecided():
    # a name sitting exactly on the boundary 2^-2 with no exact tag
    t = ml_geometric()
    z = scripted_name([Fraction(1, 4)] * 50, "boundary")
    s = evaluate(t, z, 4)
    assert 2 in s.undecided


def test_convert_solovay_to_ml_bounds_and_membership():
    t = TestFamily(
        TestKind.SOLOVAY,
        {m: [geometric(m)] for m in range(1, 9)},
        {"total_bound": Fraction(1)},
    )
    ml = convert_solovay_to_ml(t, 6)
    assert validate(ml).passed
    # 2^-9 lies in all eight source components, so it survives every threshold
    s = evaluate(ml, const_name(Fraction(1, 2**9)), 3)
    assert s.captured == (0, 1, 2, 3)


def test_build_pi1_ml_test_bounds():
    q = [Fraction(1, 2) - Fraction(1, 2**n) for n in range(66)]
    C = [frozenset(range(m + 1)) for m in range(8)]
    t = build_pi1_ml_test(q, C, 64)
    for m in t.indices():
        assert t.final(m).measure <= Fraction(1, 2**m)


def test_build_pi1_ml_test_captures_limit_point():
    q = [Fraction(1, 2) - Fraction(1, 2**n) for n in range(66)]
    C = [frozenset(range(m + 1)) for m in range(8)]
    t = build_pi1_ml_test(q, C, 64)
    z = scripted_name(
        [Fraction(1, 2) - Fraction(1, 2 ** (p + 1)) for p in range(50)], "limit"
    )
    s = evaluate(t, z, 6)
    assert s.captured == tuple(range(7))


def test_build_hop_sets_counts_jumps():
    # the walk alternates between the two halves, every step is a hop
    q = [Fraction(1, 4), Fraction(3, 4), Fraction(1, 4), Fraction(3, 4)]
    V = [["0", "1"]]
    with pytest.raises(NotPrefixFree):
        build_hop_sets(q, [["0", "01"]], 3)
    # cylinders [0) and [1) are contiguous, so no hop is recorded
    assert build_hop_sets(q, V, 3) == [set()]
    # separate the halves by a buffer: [00) and [11) are non-contiguous
    V2 = [["00", "11"]]
    q2 = [Fraction(1, 8), Fraction(7, 8), Fraction(1, 8)]
    assert build_hop_sets(q2, V2, 3) == [{0, 1}]


def test_hop_requires_distinct_cylinders():
    # both points inside [00): same sigma, not a hop
    q = [Fraction(1, 8), Fraction(1, 16)]
    assert build_hop_sets(q, [["00", "11"]], 3) == [set()]


def demuth_family() -> TestFamily:
    return TestFamily(
        TestKind.DEMUTH,
        {3: [geometric(3)]},
        {"budgets": {3: 4}},
    )


def test_demuth_update_appends_version():
    t = demuth_family()
    t2 = demuth_update(t, 3, geometric(4))
    assert len(t2.components[3]) == 2
    assert len(t.components[3]) == 1  # original untouched


def test_demuth_update_budget_enforced():
    t = demuth_family()
    for _ in range(3):
        t = demuth_update(t, 3, geometric(4))
    assert len(t.components[3]) == 4
    with pytest.raises(BudgetExceeded):
        demuth_update(t, 3, geometric(5))


def test_demuth_update_measure_enforced():
    with pytest.raises(MeasureBoundViolation):
        demuth_update(demuth_family(), 3, geometric(2))


def iseq_family() -> TestFamily:
    blocks, excl = {}, {}
    for m in range(1, 4):
        for r in range(1, 4):
            w = Fraction(1, 2 ** (m + r + 1))
            blocks[(m, r)] = {
                0: RationalInterval(Fraction(0), w, True, True),
                1: RationalInterval(Fraction(1, 2), Fraction(1, 2) + w, True, True),
            }
            excl[(m, r)] = frozenset({1})
    return TestFamily(
        TestKind.INTERVAL_SEQUENCE, {}, {"blocks": blocks, "excluded": excl}
    )


def test_interval_sequence_bounds():
    assert validate(iseq_family()).passed


def test_excised_blocks_do_not_count():
    t = iseq_family()
    # un-excising index 1 doubles every block measure but stays within the per-block bound
    t2 = TestFamily(
        TestKind.INTERVAL_SEQUENCE,
        {},
        {"blocks": t.kind_data["blocks"], "excluded": {}},
    )
    assert validate(t2).passed


def test_interval_sequence_to_schnorr_round():
    sch = interval_sequence_to_schnorr(iseq_family(), 4)
    assert sch.kind is TestKind.SCHNORR
    assert validate(sch).passed
    assert sch.kind_data["relativized"] is True


def test_schnorr_to_interval_sequence_with_mind_changes():
    sch = interval_sequence_to_schnorr(iseq_family(), 4)

    def script(query, stage):
        _, m, r = query
        w = Fraction(1, 2 ** (m + r + 2))
        early = (RationalInterval(Fraction(1, 4), Fraction(1, 4) + w, True, True),)
        late = (RationalInterval(Fraction(0), w, True, True),)
        return early if stage < 2 else late

    oracle = LimitOracle(script, budget=4)
    t = schnorr_to_interval_sequence(sch, oracle, 3)
    assert t.kind is TestKind.INTERVAL_SEQUENCE
    assert validate(t).passed
    # each mind change excised the previously emitted block index
    assert all(excl for excl in t.kind_data["excluded"].values())


@settings(max_examples=40, deadline=None)
@given(
    st.integers(0, 6),
    st.lists(
        st.tuples(
            st.fractions(min_value=0, max_value=1, max_denominator=64),
            st.fractions(min_value=0, max_value=1, max_denominator=64),
        ),
        max_size=5,
    ),
)
def test_validate_agrees_with_direct_measure_check(m, raw):
    u = normalize_union(
        RationalInterval(min(a, b), max(a, b), True, True) for a, b in raw if a != b
    )
    t = TestFamily(TestKind.ML, {m: [u]})
    assert validate(t).passed == (u.measure <= Fraction(1, 2**m))
