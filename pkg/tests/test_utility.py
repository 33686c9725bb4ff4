import itertools

import pytest
from hypothesis import given, strategies as st

from shortlist_strat import (CANDEGAL, EGAL, UTIL, EvalVariant, InvalidParameterError,
                             UnsupportedVariantError, UtilityProfile, contract, evaluate)
from conftest import ids

profiles = st.integers(1, 4).flatmap(lambda r: st.integers(2, 6).flatmap(
    lambda m: st.lists(st.lists(st.integers(0, 5), min_size=m, max_size=m), min_size=r, max_size=r)
)).map(UtilityProfile)


@pytest.mark.parametrize("variant,value", [(UTIL, 20), (EGAL, 6), (CANDEGAL, 5)])
def test_two_manipulators_b1_m1(two_manipulators, variant, value):
    assert evaluate(two_manipulators, ids("b1", "m1"), variant) == value


def test_contract_util(two_manipulators):
    assert contract(two_manipulators, UTIL) == (11, 7, 9, 7, 0, 0)


def test_contract_candegal(two_manipulators):
    assert contract(two_manipulators, CANDEGAL) == (1, 2, 4, 0, 0, 0)


@pytest.mark.parametrize("variant", [UTIL, CANDEGAL])
def test_contract_single_row_is_identity(variant):
    assert contract(UtilityProfile([[3, 1, 4]]), variant) == (3, 1, 4)


def test_contract_rejects_egal(two_manipulators):
    with pytest.raises(UnsupportedVariantError):
        contract(two_manipulators, EGAL)


def test_evaluate_rejects_out_of_range(two_manipulators):
    with pytest.raises(InvalidParameterError):
        evaluate(two_manipulators, {0, 6}, UTIL)


@pytest.mark.parametrize("rows", [[], [[1, 2], [1]], [[1, -1]]])
def test_profile_validation(rows):
    with pytest.raises(InvalidParameterError):
        UtilityProfile(rows)


def test_u_diff(two_manipulators):
    assert two_manipulators.u_diff() == 7  # 0, 1, 2, 4, 5, 7, 10


def test_variant_parse():
    assert EvalVariant.parse("candegal") is CANDEGAL
    with pytest.raises(InvalidParameterError):
        EvalVariant.parse("nash")


@given(profiles, st.data())
def test_contraction_matches_evaluation(profile, data):
    k = data.draw(st.integers(1, profile.m))
    for variant in (UTIL, CANDEGAL):
        row = contract(profile, variant)
        for s in itertools.combinations(range(profile.m), k):
            assert evaluate(profile, s, variant) == sum(row[c] for c in s)


@given(profiles, st.data())
def test_zero_candidate_changes_nothing(profile, data):
    rows = [list(row) + [0] for row in profile.rows]
    wider = UtilityProfile(rows)
    s = data.draw(st.sets(st.integers(0, profile.m - 1), min_size=1))
    for variant in EvalVariant:
        assert evaluate(wider, s | {profile.m}, variant) == evaluate(profile, s, variant)


@given(profiles, st.data())
def test_egal_below_every_row(profile, data):
    s = data.draw(st.sets(st.integers(0, profile.m - 1), min_size=1))
    value = evaluate(profile, s, EGAL)
    assert all(value <= sum(row[c] for c in s) for row in profile.rows)
