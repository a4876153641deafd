"""Payoff schemes, total profit, potentials, and move semantics."""

import itertools
from fractions import Fraction

import pytest

from profitgames import (
    AdditiveValuation,
    GameSpec,
    InvalidArgument,
    NoOpMove,
    OrderedState,
    PartitionState,
    Scheme,
    SchemeMismatch,
    TableValuation,
    all_payoffs,
    apply_move,
    enumerate_states,
    payoff,
    potential,
    total_profit,
)
from profitgames.corpus import scheme_corpus, two_party_gap_game


def gap3(scheme=Scheme.SHAPLEY):
    base = two_party_gap_game(3)
    return GameSpec(3, 2, base.valuations, scheme)


def test_spec_rejects_more_parties_than_players():
    v = AdditiveValuation(["1", "1"])
    with pytest.raises(InvalidArgument):
        GameSpec(2, 3, (v, v, v), Scheme.FAIR_VALUE)


def test_fair_value_flat_party_pays_nothing():
    spec = gap3(Scheme.FAIR_VALUE)
    state = PartitionState((1, 2, 2))
    assert payoff(spec, state, 2) == 0


def test_unaffiliated_player_earns_zero():
    v = AdditiveValuation(["1", "2", "3"])
    spec = GameSpec(3, 2, (v, v), Scheme.LABOR_UNION)
    state = OrderedState(((1,), ()), frozenset({2, 3}))
    assert payoff(spec, state, 2) == 0


def test_shapley_flat_pair_splits_evenly():
    flat = TableValuation([0] + [1] * 7)
    spec = GameSpec(3, 2, (flat, flat), Scheme.SHAPLEY)
    state = PartitionState((1, 2, 2))
    assert payoff(spec, state, 2) == Fraction(1, 2)


def test_shapley_under_additive_valuations_is_fair_value():
    rows = [AdditiveValuation(["1/2", "3", "0", "5/3"]), AdditiveValuation(["2", "1", "1", "1"])]
    shapley = GameSpec(4, 2, tuple(rows), Scheme.SHAPLEY)
    fair = GameSpec(4, 2, tuple(rows), Scheme.FAIR_VALUE)
    for state in enumerate_states(shapley):
        assert all_payoffs(shapley, state) == all_payoffs(fair, state)


def test_gap_game_payoff_vector():
    assert all_payoffs(gap3(), PartitionState((1, 2, 2))) == (
        Fraction(1, 3),
        Fraction(1, 2),
        Fraction(1, 2),
    )


def test_labor_union_payoffs_telescope():
    levels = ["0", "1", "1.414214", "1.732051"]
    from profitgames import ConcaveCardinalityValuation

    v = ConcaveCardinalityValuation(levels)
    spec = GameSpec(3, 1, (v,), Scheme.LABOR_UNION)
    state = OrderedState(((3, 1, 2),), frozenset())
    c = v.levels
    assert payoff(spec, state, 3) == c[1]
    assert payoff(spec, state, 1) == c[2] - c[1]
    assert payoff(spec, state, 2) == c[3] - c[2]


def test_singleton_parties_pay_singleton_values():
    rows = (AdditiveValuation([1, 5, 2]), AdditiveValuation([2, 5, 2]), AdditiveValuation([3, 5, 2]))
    spec = GameSpec(3, 3, rows, Scheme.FAIR_VALUE)
    state = PartitionState((1, 2, 3))
    assert all_payoffs(spec, state) == tuple(rows[i].value({i + 1}) for i in range(3))


def test_total_profit_values():
    spec = gap3()
    assert total_profit(spec, PartitionState((2, 1, 1))) == 2
    assert total_profit(spec, PartitionState((1, 2, 2))) == Fraction(4, 3)


def test_total_profit_all_unaffiliated_is_zero():
    v = AdditiveValuation(["1", "2", "3"])
    spec = GameSpec(3, 2, (v, v), Scheme.LABOR_UNION)
    state = OrderedState(((), ()), frozenset({1, 2, 3}))
    assert total_profit(spec, state) == 0


def test_fair_value_potential_is_total_profit():
    spec = gap3(Scheme.FAIR_VALUE)
    for state in enumerate_states(spec):
        assert potential(spec, state) == total_profit(spec, state)


def test_shapley_potential_flat_pair():
    flat = TableValuation([0] + [1] * 7)
    spec = GameSpec(3, 2, (flat, flat), Scheme.SHAPLEY)
    # all three in party 2: potential = 3 * 1/3... compute for party {2,3} only
    state = PartitionState((1, 2, 2))
    # party 1 = {1}: phi = 1; party 2 = {2,3}: 1/2 + 1/2 + 1/2
    assert potential(spec, state) == 1 + Fraction(3, 2)


def test_shapley_potential_empty_party_contributes_zero():
    flat = TableValuation([0] + [1] * 7)
    spec = GameSpec(3, 2, (flat, flat), Scheme.SHAPLEY)
    grand = PartitionState((1, 1, 1))
    single = GameSpec(3, 1, (flat,), Scheme.SHAPLEY)
    assert potential(spec, grand) == potential(single, PartitionState((1, 1, 1)))


def test_apply_move_ordered_semantics():
    state = OrderedState(((3, 1, 2), ()), frozenset())
    moved = apply_move(state, 1, 2)
    assert moved.sequences == ((3, 2), (1,))
    assert state.sequences == ((3, 1, 2), ())  # value semantics


def test_apply_move_partition():
    assert apply_move(PartitionState((1, 1, 1)), 1, 2, m=2).assignment == (2, 1, 1)


def test_apply_move_to_unaffiliated():
    state = OrderedState(((3, 1, 2), ()), frozenset())
    moved = apply_move(state, 1, 0)
    assert moved.unaffiliated == frozenset({1})
    v = AdditiveValuation(["1", "1", "1"])
    spec = GameSpec(3, 2, (v, v), Scheme.LABOR_UNION)
    assert payoff(spec, moved, 1) == 0


def test_apply_move_rejects_noop_and_bad_targets():
    state = PartitionState((1, 2))
    with pytest.raises(NoOpMove):
        apply_move(state, 1, 1, m=2)
    with pytest.raises(InvalidArgument):
        apply_move(state, 1, 3, m=2)
    with pytest.raises(InvalidArgument):
        apply_move(state, 1, 0, m=2)
    ordered = OrderedState(((1,), (2,)), frozenset())
    with pytest.raises(NoOpMove):
        apply_move(ordered, 2, 2)


def test_scheme_state_mismatch_raises():
    spec = gap3()
    with pytest.raises(SchemeMismatch):
        payoff(spec, OrderedState(((1,), (2, 3)), frozenset()), 1)


# -- exhaustive scheme invariants on corpus samples -----------------------------


def _small(corpus, top_n, limit):
    picked = [g for g in corpus if g.n <= top_n]
    return picked[:limit]


@pytest.mark.parametrize("spec", _small(scheme_corpus(Scheme.FAIR_VALUE), 4, 8))
def test_fair_value_feasibility(spec):
    for state in enumerate_states(spec):
        payoffs = all_payoffs(spec, state)
        for j in range(1, spec.m + 1):
            members = state.party_members(j)
            share = sum((payoffs[i - 1] for i in members), Fraction(0))
            assert share <= spec.valuations[j - 1].value(members)


@pytest.mark.parametrize("spec", _small(scheme_corpus(Scheme.LABOR_UNION), 4, 6))
def test_labor_union_full_distribution(spec):
    for state in enumerate_states(spec, expand_orderings=True):
        payoffs = all_payoffs(spec, state)
        for j in range(1, spec.m + 1):
            members = state.party_members(j)
            share = sum((payoffs[i - 1] for i in members), Fraction(0))
            assert share == spec.valuations[j - 1].value(members)
        assert sum(payoffs, Fraction(0)) == total_profit(spec, state)


@pytest.mark.parametrize("spec", _small(scheme_corpus(Scheme.SHAPLEY), 4, 8))
def test_shapley_efficiency(spec):
    for state in enumerate_states(spec):
        payoffs = all_payoffs(spec, state)
        for j in range(1, spec.m + 1):
            members = state.party_members(j)
            share = sum((payoffs[i - 1] for i in members), Fraction(0))
            assert share == spec.valuations[j - 1].value(members)


@pytest.mark.parametrize(
    "scheme", [Scheme.FAIR_VALUE, Scheme.SHAPLEY], ids=["fair_value", "shapley"]
)
def test_exact_potential_identity_all_moves(scheme):
    for spec in _small(scheme_corpus(scheme), 4, 5):
        for state in enumerate_states(spec):
            base_pot = potential(spec, state)
            base_pay = all_payoffs(spec, state)
            for player in range(1, spec.n + 1):
                for target in range(1, spec.m + 1):
                    if target == state.assignment[player - 1]:
                        continue
                    moved = apply_move(state, player, target, m=spec.m)
                    assert potential(spec, moved) - base_pot == payoff(
                        spec, moved, player
                    ) - base_pay[player - 1]


@pytest.mark.parametrize("spec", _small(scheme_corpus(Scheme.LABOR_UNION), 4, 5))
def test_labor_union_guaranteed_payoff(spec):
    """Whatever one player does, every other affiliated player keeps at least
    its payoff; a departure can only raise a stayer's pay."""
    for state in enumerate_states(spec, expand_orderings=True):
        base = all_payoffs(spec, state)
        for mover in range(1, spec.n + 1):
            current = state.strategy_of(mover)
            for target in range(0, spec.m + 1):
                if target == current:
                    continue
                moved = apply_move(state, mover, target)
                after = all_payoffs(spec, moved)
                for other in range(1, spec.n + 1):
                    if other == mover or other in state.unaffiliated:
                        continue
                    assert after[other - 1] >= base[other - 1]


@pytest.mark.parametrize("spec", _small(scheme_corpus(Scheme.LABOR_UNION), 4, 5))
def test_labor_union_stay_put_join_invariance(spec):
    """A successor joining a party never changes the incumbents' payoffs."""
    for state in enumerate_states(spec, expand_orderings=True):
        base = all_payoffs(spec, state)
        for mover in sorted(state.unaffiliated):
            for target in range(1, spec.m + 1):
                moved = apply_move(state, mover, target)
                after = all_payoffs(spec, moved)
                for other in range(1, spec.n + 1):
                    if other != mover and other not in state.unaffiliated:
                        assert after[other - 1] == base[other - 1]


def test_order_invariance_of_total_profit():
    spec = _small(scheme_corpus(Scheme.LABOR_UNION), 4, 1)[0]
    seen = {}
    for state in enumerate_states(spec, expand_orderings=True):
        shape = state.shape()
        tp = total_profit(spec, state)
        assert seen.setdefault(shape, tp) == tp
