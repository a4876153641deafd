"""Seeded random instances and fixed fixtures for the verification suites.

Generators only emit valuations that pass exhaustive validation, so every
suite can assume monotone submodular inputs.  Labor-union instances always
carry at least one strictly monotone valuation: a player whose best gain is
exactly zero would never record a move, and the n-step convergence claim
from the all-unaffiliated start is stated for strict improvements.
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache

from .games import GameSpec, Scheme
from .graphgames import WeightedGraph
from .valuations import (
    AdditiveValuation,
    ConcaveCardinalityValuation,
    CoverageValuation,
    TableValuation,
    Valuation,
    validate,
)

MASTER_SEED = 75021
DEFAULT_CORPUS_SIZE = 200
DEFAULT_FLOOR_CORPUS_SIZE = 30
DEFAULT_GRAPH_CORPUS_SIZE = 100

_ZERO = Fraction(0)


def two_party_gap_game(n: int) -> GameSpec:
    """Two-party shapley family with fully known equilibrium structure.

    Party 1 is additive with one light player (weight 1/n) and n-1 players of
    weight 1/(n-1); party 2 is worth 1 for any nonempty membership.  For
    n >= 3 the price of anarchy is exactly 2 - 2/(n+1) and the price of
    stability exactly 2 - 4/(n+1).
    """
    if n < 3:
        raise ValueError("the family needs n >= 3")
    first = AdditiveValuation([Fraction(1, n)] + [Fraction(1, n - 1)] * (n - 1))
    flat = TableValuation([0] + [1] * ((1 << n) - 1))
    return GameSpec(n=n, m=2, valuations=(first, flat), scheme=Scheme.SHAPLEY)


def fair_value_anarchy_fixture() -> GameSpec:
    """A two-player fair-value game whose price of anarchy is exactly 2.

    Found by searching two-player tables: each party values the *other*
    player at 1 and its "own" player at 1/2, with both pairs worth 1.  The
    split (1->party 1, 2->party 2) is an equilibrium held together by exact
    payoff ties and earns 1, while the swapped split earns 2.
    """
    own = TableValuation(["0", "1/2", "1", "1"])
    other = TableValuation(["0", "1", "1/2", "1"])
    return GameSpec(n=2, m=2, valuations=(own, other), scheme=Scheme.FAIR_VALUE)


# -- random valuations --------------------------------------------------------


def _rational(rng: random.Random, max_num: int = 6, max_den: int = 4) -> Fraction:
    return Fraction(rng.randint(1, max_num), rng.randint(1, max_den))


def _random_additive(rng: random.Random, n: int, strictly_positive: bool) -> AdditiveValuation:
    weights = [
        _ZERO if (not strictly_positive and rng.random() < 0.25) else _rational(rng)
        for _ in range(n)
    ]
    if all(w == 0 for w in weights):
        weights[rng.randrange(n)] = _rational(rng)
    return AdditiveValuation(weights)


def _random_concave(rng: random.Random, n: int, strictly_increasing: bool) -> ConcaveCardinalityValuation:
    increments = [_rational(rng)]
    low = 1 if strictly_increasing else 0
    for _ in range(n - 1):
        increments.append(increments[-1] * Fraction(rng.randint(low, 4), 4))
    levels = [_ZERO]
    for d in increments:
        levels.append(levels[-1] + d)
    return ConcaveCardinalityValuation(levels)


def _random_coverage(rng: random.Random, n: int, allow_hyper: bool = True) -> CoverageValuation:
    edges: list[tuple[int, Fraction]] = []
    for a in range(1, n + 1):
        for b in range(a + 1, n + 1):
            if rng.random() < 0.55:
                edges.append(((1 << (a - 1)) | (1 << (b - 1)), _rational(rng)))
    if allow_hyper and n >= 3 and rng.random() < 0.3:
        members = rng.sample(range(1, n + 1), 3)
        mask = sum(1 << (i - 1) for i in members)
        if all(mask != m for m, _ in edges):
            edges.append((mask, _rational(rng)))
    if not edges:
        a, b = rng.sample(range(1, n + 1), 2) if n >= 2 else (1, 1)
        edges.append(((1 << (a - 1)) | (1 << (b - 1)), _rational(rng)))
    return CoverageValuation(n, edges)


def _random_table(rng: random.Random, n: int) -> TableValuation:
    """Budget-additive mixtures, optionally plus a max-of-weights term.

    Sums of monotone submodular pieces stay monotone submodular, so these
    tables need no rejection sampling.
    """
    size = 1 << n
    values = [_ZERO] * size
    for _ in range(rng.randint(1, 2)):
        weights = [
            _ZERO if rng.random() < 0.3 else _rational(rng, max_num=5, max_den=3)
            for _ in range(n)
        ]
        cap = _rational(rng, max_num=6, max_den=2)
        for mask in range(1, size):
            total = sum((weights[i] for i in range(n) if mask & (1 << i)), _ZERO)
            values[mask] += min(total, cap)
    if rng.random() < 0.4:
        peaks = [_rational(rng, max_num=4, max_den=3) for _ in range(n)]
        for mask in range(1, size):
            values[mask] += max(peaks[i] for i in range(n) if mask & (1 << i))
    if all(v == 0 for v in values):
        values[size - 1] = values[size - 1] + 1
        for mask in range(1, size - 1):
            values[mask] += Fraction(1, 2)
    return TableValuation(values, n=n)


_KINDS = ("additive", "concave", "coverage", "table")


def random_valuation(rng: random.Random, n: int, kind: str, *, strictly_monotone: bool = False) -> Valuation:
    if strictly_monotone and kind not in ("additive", "concave"):
        raise ValueError(f"{kind} valuations cannot be strictly monotone")
    if kind == "additive":
        return _random_additive(rng, n, strictly_positive=strictly_monotone)
    if kind == "concave":
        return _random_concave(rng, n, strictly_increasing=strictly_monotone)
    if kind == "coverage":
        return _random_coverage(rng, n)
    if kind == "table":
        return _random_table(rng, n)
    raise ValueError(f"unknown kind {kind!r}")


def _floor_one_table(rng: random.Random, n: int) -> TableValuation:
    """v(S) = 1 + g(S) on nonempty S: stays monotone submodular and is
    bounded below by 1 away from the empty set."""
    base = random_valuation(rng, n, rng.choice(_KINDS))
    table = base.dense_table()
    values = [_ZERO] + [1 + table[mask] for mask in range(1, 1 << n)]
    return TableValuation(values, n=n)


# -- random games --------------------------------------------------------------


def _draw_sizes(rng: random.Random) -> tuple[int, int]:
    n = rng.choices((2, 3, 4, 5), weights=(15, 40, 30, 15))[0]
    m = 2 if n == 2 else rng.choice((2, 2, 3))
    return n, m


def random_game(rng: random.Random, scheme: Scheme, *, n: int | None = None, m: int | None = None) -> GameSpec:
    if n is None or m is None:
        n, m = _draw_sizes(rng)
    valuations = []
    for j in range(m):
        if scheme is Scheme.LABOR_UNION and j == 0:
            kind = rng.choice(("additive", "concave"))
            v = random_valuation(rng, n, kind, strictly_monotone=True)
        else:
            v = random_valuation(rng, n, rng.choice(_KINDS))
        report = validate(v)
        assert report.monotone and report.submodular, f"generator produced an invalid {v.kind}"
        valuations.append(v)
    return GameSpec(n=n, m=m, valuations=tuple(valuations), scheme=scheme)


@lru_cache(maxsize=None)
def scheme_corpus(scheme: Scheme, count: int = DEFAULT_CORPUS_SIZE, seed: int = MASTER_SEED) -> tuple[GameSpec, ...]:
    """Deterministic sample of games for one scheme.

    The fair-value corpus additionally carries the anarchy fixture so the
    price-of-anarchy suite is provably non-vacuous above 3/2.
    """
    rng = random.Random(f"{seed}-{scheme.value}")
    games = [random_game(rng, scheme) for _ in range(count)]
    if scheme is Scheme.FAIR_VALUE:
        games.append(fair_value_anarchy_fixture())
    return tuple(games)


@lru_cache(maxsize=None)
def floor_one_corpus(count: int = DEFAULT_FLOOR_CORPUS_SIZE, seed: int = MASTER_SEED) -> tuple[GameSpec, ...]:
    """Labor-union games whose parties are worth >= 1 on every nonempty set."""
    rng = random.Random(f"{seed}-floor-one")
    games = []
    for _ in range(count):
        n, m = _draw_sizes(rng)
        valuations = tuple(_floor_one_table(rng, n) for _ in range(m))
        for v in valuations:
            report = validate(v)
            assert report.monotone and report.submodular
        games.append(GameSpec(n=n, m=m, valuations=valuations, scheme=Scheme.LABOR_UNION))
    return tuple(games)


@lru_cache(maxsize=None)
def graph_corpus(count: int = DEFAULT_GRAPH_CORPUS_SIZE, seed: int = MASTER_SEED) -> tuple[WeightedGraph, ...]:
    """Ordinary weighted graphs for the closed-form payoff suite."""
    rng = random.Random(f"{seed}-graphs")
    graphs = []
    for _ in range(count):
        n = rng.choices((3, 4, 5, 6), weights=(30, 30, 25, 15))[0]
        edges = []
        for a in range(1, n + 1):
            for b in range(a + 1, n + 1):
                if rng.random() < 0.55:
                    edges.append(((a, b), _rational(rng, max_num=5, max_den=3)))
        if not edges:
            edges.append(((1, 2), _rational(rng)))
        graphs.append(WeightedGraph.from_edges(n, edges))
    return tuple(graphs)
