"""Determinism and coverage properties of the seeded instance generators."""

from fractions import Fraction

from profitgames import Scheme, validate
from profitgames.corpus import (
    fair_value_anarchy_fixture,
    floor_one_corpus,
    graph_corpus,
    scheme_corpus,
    two_party_gap_game,
)
from profitgames.specio import serialize_game_spec


def test_corpora_are_deterministic():
    scheme_corpus.cache_clear()
    first = [serialize_game_spec(g) for g in scheme_corpus(Scheme.SHAPLEY)]
    scheme_corpus.cache_clear()
    second = [serialize_game_spec(g) for g in scheme_corpus(Scheme.SHAPLEY)]
    assert first == second


def test_corpus_sizes_and_bounds():
    for scheme in Scheme:
        games = scheme_corpus(scheme)
        assert len(games) >= 200
        assert all(g.n <= 5 and g.m <= 3 for g in games)


def test_corpus_draws_all_constructor_kinds():
    for scheme in Scheme:
        kinds = {v.kind for g in scheme_corpus(scheme) for v in g.valuations}
        assert kinds == {"additive", "concave_cardinality", "coverage", "table"}


def test_labor_union_instances_lead_with_strict_monotone_valuation():
    for spec in scheme_corpus(Scheme.LABOR_UNION)[:40]:
        lead = spec.valuations[0]
        table = lead.dense_table()
        for mask in range(1 << spec.n):
            for i in range(spec.n):
                bit = 1 << i
                if not mask & bit:
                    assert table[mask | bit] > table[mask]


def test_floor_one_corpus_is_bounded_below():
    for spec in floor_one_corpus():
        for v in spec.valuations:
            table = v.dense_table()
            assert all(table[mask] >= 1 for mask in range(1, 1 << spec.n))


def test_graph_corpus_is_ordinary_and_weighted():
    graphs = graph_corpus()
    assert len(graphs) == 100
    for graph in graphs:
        assert graph.is_ordinary()
        assert graph.edges and all(w > 0 for _, w in graph.edges)


def test_fixture_and_gap_games_validate():
    for spec in (fair_value_anarchy_fixture(), two_party_gap_game(3), two_party_gap_game(5)):
        for v in spec.valuations:
            report = validate(v)
            assert report.monotone and report.submodular
