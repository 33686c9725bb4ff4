import itertools

import pytest
from hypothesis import given, strategies as st

from shortlist_strat import (CANDEGAL, EGAL, UTIL, Behavior, InvalidParameterError, Lexicographic,
                             Optimistic, Pessimistic, TiePerspective, UnsupportedVariantError,
                             UtilityProfile, apply_lex, evaluate, simulate_lex, tie_break)
from shortlist_strat.oracle import SetCoverInstance, brute_tie, reduce_setcover_to_tie
from shortlist_strat.tiebreak import opt_egal_exact, pess_egal
from conftest import NAMES, ids

FOUR = ids("b1", "b2", "m1", "m2")


@st.composite
def perspectives(draw, max_pending=8, max_r=3, max_u=3):
    confirmed_n = draw(st.integers(0, 3))
    pending_n = draw(st.integers(1, max_pending))
    rejected_n = draw(st.integers(0, 2))
    m = confirmed_n + pending_n + rejected_n
    perm = draw(st.permutations(range(m)))
    k = confirmed_n + draw(st.integers(1, pending_n))
    r = draw(st.integers(1, max_r))
    rows = draw(st.lists(st.lists(st.integers(0, max_u), min_size=m, max_size=m),
                         min_size=r, max_size=r))
    return TiePerspective(perm[:confirmed_n], perm[confirmed_n:confirmed_n + pending_n], k,
                          UtilityProfile(rows))


def order_of(*names):
    return tuple(NAMES.index(n) for n in names)


# ------------------------------------------------------------------ lexicographic

def test_apply_lex_single_slot():
    p = TiePerspective(set(), ids("b1", "b2"), 1)
    assert apply_lex(p, order_of("b1", "b2", "m1", "m2", "o1", "o2")) == ids("b1")


def test_apply_lex_keeps_confirmed():
    p = TiePerspective(ids("o1"), ids("b1", "b2", "m1"), 2)
    assert apply_lex(p, order_of("m1", "b1", "b2", "m2", "o1", "o2")) == ids("o1", "m1")


def test_apply_lex_prefix():
    p = TiePerspective(set(), range(6), 3)
    assert apply_lex(p, range(6)) == ids("b1", "b2", "m1")


@pytest.mark.parametrize("confirmed,pending,k", [({0}, {0, 1}, 2), ({0, 1}, {2}, 2), (set(), {0}, 2)])
def test_perspective_invariants(confirmed, pending, k):
    with pytest.raises(InvalidParameterError):
        TiePerspective(confirmed, pending, k)


def test_rules_needing_utilities_complain():
    with pytest.raises(InvalidParameterError):
        tie_break(TiePerspective(set(), {0, 1}, 1), Optimistic(UTIL))


# ---------------------------------------------------------------------- simulator

def test_simulate_util_optimistic(two_manipulators):
    assert simulate_lex(two_manipulators, UTIL, Behavior.OPTIMISTIC) == \
        order_of("b1", "m1", "b2", "m2", "o1", "o2")


def test_simulate_candegal_optimistic(two_manipulators):
    assert simulate_lex(two_manipulators, CANDEGAL, Behavior.OPTIMISTIC) == \
        order_of("m1", "b2", "b1", "m2", "o1", "o2")


@pytest.mark.parametrize("variant", [UTIL, CANDEGAL])
def test_simulate_single_manipulator_prefers_b1(variant):
    order = simulate_lex(UtilityProfile([[1, 0]]), variant, Behavior.OPTIMISTIC)
    assert order.index(0) < order.index(1)


def test_simulate_rejects_egal(two_manipulators):
    with pytest.raises(UnsupportedVariantError):
        simulate_lex(two_manipulators, EGAL, Behavior.PESSIMISTIC)


@given(perspectives())
def test_simulator_reaches_extremum(p):
    for variant in (UTIL, CANDEGAL):
        for rule in (Optimistic(variant), Pessimistic(variant)):
            egroup = apply_lex(p, simulate_lex(p.profile, variant, rule.behavior))
            assert evaluate(p.profile, egroup, variant) == brute_tie(p, rule)[1]


# -------------------------------------------------------------------- egalitarian

def test_optimistic_egal_one_seat(two_manipulators):
    assert tie_break(TiePerspective(set(), FOUR, 1, two_manipulators), Optimistic(EGAL)) == (ids("m1"), 4)


def test_optimistic_egal_two_seats(two_manipulators):
    assert tie_break(TiePerspective(set(), FOUR, 2, two_manipulators), Optimistic(EGAL)) == \
        (ids("b1", "m2"), 8)


def test_pessimistic_egal_two_seats(two_manipulators):
    p = TiePerspective(set(), FOUR, 2, two_manipulators)
    assert tie_break(p, Pessimistic(EGAL)) == (ids("b1", "b2"), 3)
    assert pess_egal(p) == (ids("b1", "b2"), 3)


def test_pessimistic_egal_one_seat(two_manipulators):
    assert pess_egal(TiePerspective(set(), FOUR, 1, two_manipulators)) == (ids("m2"), 0)


def test_pessimistic_egal_single_manipulator():
    p = TiePerspective(set(), {0, 1, 2}, 2, UtilityProfile([[5, 1, 3, 0]]))
    assert pess_egal(p) == (frozenset({1, 2}), 4)


@pytest.mark.parametrize("k,expected", [(1, (ids("m1"), 4)), (2, (ids("b1", "m2"), 8))])
def test_opt_egal_exact_examples(two_manipulators, k, expected):
    assert opt_egal_exact(TiePerspective(set(), FOUR, k, two_manipulators)) == expected


def test_opt_egal_exact_on_cover_instance():
    tie = reduce_setcover_to_tie(SetCoverInstance(2, [{0}, {1}, {0, 1}], 1))
    assert opt_egal_exact(tie.perspective) == (frozenset({2}), 1)


def test_no_lex_order_reproduces_both_seat_counts(two_manipulators):
    """Optimistic egalitarian choices at k=1 and k=2 disagree with every fixed order."""
    best = {k: tie_break(TiePerspective(set(), FOUR, k, two_manipulators), Optimistic(EGAL))[1]
            for k in (1, 2)}
    for perm in itertools.permutations(sorted(FOUR)):
        order = perm + order_of("o1", "o2")
        hits = [evaluate(two_manipulators,
                         apply_lex(TiePerspective(set(), FOUR, k, two_manipulators), order),
                         EGAL) == best[k] for k in (1, 2)]
        assert not all(hits), perm


# --------------------------------------------------------------- against oracle

ALL_RULES = [rule(v) for v in (UTIL, EGAL, CANDEGAL) for rule in (Optimistic, Pessimistic)]


@given(perspectives())
def test_tie_break_matches_brute_force(p):
    for rule in ALL_RULES:
        egroup, value = tie_break(p, rule)
        assert p.confirmed <= egroup <= p.confirmed | p.pending and len(egroup) == p.k
        assert value == evaluate(p.profile, egroup, rule.variant)
        assert value == brute_tie(p, rule)[1]


@given(perspectives())
def test_contractible_rules_pick_canonical_egroup(p):
    for variant in (UTIL, CANDEGAL):
        for rule in (Optimistic(variant), Pessimistic(variant)):
            assert tie_break(p, rule) == brute_tie(p, rule)


@given(perspectives(), st.data())
def test_lex_range_and_value(p, data):
    order = data.draw(st.permutations(range(p.profile.m)))
    egroup, value = tie_break(p, Lexicographic(order), EGAL)
    assert p.confirmed <= egroup and len(egroup) == p.k
    assert value == evaluate(p.profile, egroup, EGAL)
    assert tie_break(p, Lexicographic(order)) == (egroup, 0)


def test_egal_solvers_on_cover_instances():
    subsets = [frozenset(s) for n in range(3) for s in itertools.combinations(range(4), n)]
    for universe in range(1, 5):
        pool = [s for s in subsets if all(x < universe for x in s)]
        for count in range(1, 6):
            for sets in itertools.islice(itertools.product(pool, repeat=count), 0, None, 7):
                for h in range(1, count + 1):
                    p = reduce_setcover_to_tie(SetCoverInstance(universe, sets, h)).perspective
                    assert opt_egal_exact(p)[1] == brute_tie(p, Optimistic(EGAL))[1]
                    assert pess_egal(p)[1] == brute_tie(p, Pessimistic(EGAL))[1]
