"""Enumeration, optimum, equilibrium classification, prices, niceness."""

import math
from fractions import Fraction
from itertools import product

import pytest

from profitgames import (
    AdditiveValuation,
    GameSpec,
    OrderedState,
    PartitionState,
    Scheme,
    TableValuation,
    WeightedGraph,
    classify_state,
    coverage_valuation,
    enumerate_states,
    equilibrium_shapes,
    optimum,
    prices,
    state_count,
    strong_deviation,
    verify_niceness,
)
from profitgames.corpus import fair_value_anarchy_fixture, scheme_corpus, two_party_gap_game
from profitgames.errors import TooLarge


def lu_pair():
    v = AdditiveValuation(["1", "2", "3"])
    w = TableValuation([0] + [2] * 7)
    return GameSpec(3, 2, (v, w), Scheme.LABOR_UNION)


def test_two_player_state_space():
    v = AdditiveValuation(["1", "1"])
    spec = GameSpec(2, 2, (v, v), Scheme.FAIR_VALUE)
    assert [s.assignment for s in enumerate_states(spec)] == [(1, 1), (1, 2), (2, 1), (2, 2)]


def test_three_player_lexicographic_order():
    spec = two_party_gap_game(3)
    seen = [s.assignment for s in enumerate_states(spec)]
    assert seen[0] == (1, 1, 1) and seen[1] == (1, 1, 2) and seen[-1] == (2, 2, 2)
    assert len(seen) == 8 == state_count(spec)


def test_ordered_state_counts_match_closed_form():
    spec = lu_pair()
    shapes = list(enumerate_states(spec))
    assert len(shapes) == 27 == state_count(spec)
    expanded = list(enumerate_states(spec, expand_orderings=True))
    assert len(expanded) == 49 == state_count(spec, expand_orderings=True)
    # Independent cross-check: sum over shapes of the product of party
    # factorials, including the unaffiliated-shape combinations.
    total = 0
    for shape in product(range(0, 3), repeat=3):
        sizes = [sum(1 for s in shape if s == j) for j in (1, 2)]
        total += math.prod(math.factorial(k) for k in sizes)
    assert total == 49
    # Fully-affiliated orderings alone: n! * C(n+m-1, m-1) = 24.
    affiliated = [s for s in expanded if not s.unaffiliated]
    assert len(affiliated) == 24


def test_enumeration_budget_guard():
    spec = two_party_gap_game(5)
    with pytest.raises(TooLarge):
        list(enumerate_states(spec, budget=10))


def test_optimum_of_gap_family():
    best = optimum(two_party_gap_game(3))
    assert best.assignment == (2, 1, 1)
    assert best.value == 2


def test_optimum_single_party_is_grand_coalition():
    v = AdditiveValuation(["1", "2", "3"])
    spec = GameSpec(3, 1, (v,), Scheme.FAIR_VALUE)
    best = optimum(spec)
    assert best.assignment == (1, 1, 1) and best.value == 6


def test_optimum_triangle_two_parties_is_maxcut_plus_weight():
    graph = WeightedGraph.from_edges(3, [((1, 2), 1), ((2, 3), 1), ((1, 3), 1)])
    v = coverage_valuation(graph)
    spec = GameSpec(3, 2, (v, v), Scheme.FAIR_VALUE)
    assert optimum(spec).value == 5


def test_classify_gap_equilibrium():
    spec = two_party_gap_game(3)
    verdict = classify_state(spec, PartitionState((1, 2, 2)))
    assert verdict.is_nash and verdict.is_alpha_nash
    verdict = classify_state(spec, PartitionState((1, 1, 1)))
    assert not verdict.is_nash


def test_alpha_relaxation_admits_more_states():
    spec = two_party_gap_game(3)
    nash = {s.assignment for s in prices(spec).equilibria}
    relaxed = {s.assignment for s in prices(spec, Fraction(1, 2)).equilibria}
    assert nash <= relaxed and len(relaxed) > len(nash)


def test_prices_gap_family_closed_forms():
    report = prices(two_party_gap_game(3))
    assert (report.poa, report.pos) == (Fraction(3, 2), Fraction(1))
    report = prices(two_party_gap_game(4))
    assert (report.poa, report.pos) == (Fraction(8, 5), Fraction(6, 5))


def test_prices_single_party_trivial():
    v = AdditiveValuation(["1", "2", "3"])
    for scheme in (Scheme.FAIR_VALUE, Scheme.SHAPLEY):
        spec = GameSpec(3, 1, (v,), scheme)
        report = prices(spec)
        assert report.poa == report.pos == 1
    lu = GameSpec(3, 1, (v,), Scheme.LABOR_UNION)
    report = prices(lu)
    assert report.poa == report.pos == 1


def test_alpha_poa_is_monotone_in_alpha():
    for spec in [g for g in scheme_corpus(Scheme.FAIR_VALUE) if g.n <= 4][:6]:
        last = None
        for alpha in (Fraction(0), Fraction(1, 4), Fraction(1, 2)):
            poa = prices(spec, alpha).poa
            if last is not None:
                assert poa >= last
            last = poa


def test_prices_threads_are_deterministic():
    spec = two_party_gap_game(4)
    serial = prices(spec)
    parallel = prices(spec, threads=2)
    assert serial.poa == parallel.poa and serial.pos == parallel.pos
    assert [s.assignment for s in serial.equilibria] == [
        s.assignment for s in parallel.equilibria
    ]


def test_fixture_reaches_anarchy_two():
    report = prices(fair_value_anarchy_fixture())
    assert report.poa == 2 and report.pos == 1


def test_labor_union_prices_quantify_over_orderings():
    spec = lu_pair()
    report = prices(spec)
    assert all(isinstance(s, OrderedState) for s in report.equilibria)
    shapes = equilibrium_shapes(spec)
    eq_shapes = {s.shape() for s in report.equilibria}
    assert set(shapes) <= eq_shapes


def test_strong_check_budget_guard():
    v = AdditiveValuation(["1"] * 9)
    spec = GameSpec(9, 2, (v, v), Scheme.FAIR_VALUE)
    with pytest.raises(TooLarge):
        classify_state(spec, PartitionState((1,) * 9), strong=True)


def test_labor_union_optimum_is_strong_equilibrium():
    spec = lu_pair()
    best = optimum(spec)
    assert strong_deviation(spec, best.state) is None
    verdict = classify_state(spec, best.state, strong=True)
    assert verdict.is_strong_nash


def test_anarchy_fixture_bad_split_is_not_strong():
    spec = fair_value_anarchy_fixture()
    state = PartitionState((1, 2))  # equilibrium held by exact ties, profit 1
    assert classify_state(spec, state).is_nash
    witness = strong_deviation(spec, state)
    assert witness is not None
    assert witness.resulting_state.assignment == (2, 1)  # the swap earns 1 each


def test_free_riding_coalitions_can_refute_stability():
    """A mover who only breaks even still refutes stability when a non-moving
    coalition partner strictly gains from the move."""
    flat = TableValuation(["0", "1", "1", "1"])
    dead = TableValuation(["0", "0", "0", "0"])
    spec = GameSpec(2, 2, (flat, dead), Scheme.FAIR_VALUE)
    state = PartitionState((1, 1))  # both paid 0; no unilateral improvement
    assert classify_state(spec, state).is_nash
    witness = strong_deviation(spec, state)
    assert witness is not None
    assert witness.moves == ((1, 2),)  # player 1 breaks even, player 2 free-rides to 1


def test_niceness_fair_value_all_checks_pass():
    for spec in [g for g in scheme_corpus(Scheme.FAIR_VALUE) if g.n <= 4][:5]:
        report = verify_niceness(spec, Fraction(2))
        assert report.beta_nice_holds and report.perfect_holds and report.exact_potential_holds
        assert report.witnesses == ()


def test_niceness_labor_union_chain_passes():
    for spec in [g for g in scheme_corpus(Scheme.LABOR_UNION) if g.n <= 4][:5]:
        report = verify_niceness(spec, Fraction(2))
        assert report.beta_nice_holds and report.perfect_holds


def test_niceness_beta_zero_fails_with_witness():
    spec = lu_pair()
    report = verify_niceness(spec, Fraction(0))
    assert not report.beta_nice_holds
    assert any(w.check == "beta_nice" for w in report.witnesses)


def test_every_corpus_game_has_an_equilibrium():
    for scheme in Scheme:
        for spec in [g for g in scheme_corpus(scheme) if g.n <= 4][:10]:
            assert prices(spec).equilibria
