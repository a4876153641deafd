"""Exhaustive desk-scale verification: equilibria, optimum, prices, niceness.

Everything here is brute force by design: states are enumerated outright,
equilibrium membership is decided by checking every unilateral (or joint)
deviation, and the anarchy/stability ratios are exact rationals.  Budgets
guard against accidentally launching an enumeration that cannot finish.

For labor-union games the primary notion of state is the ordered one, so
equilibrium filters quantify over every within-party arrival order of every
shape; shape-level summaries are a convenience on top.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .dynamics import _player_options
from .errors import NoEquilibriumFound, TooLarge
from .games import (
    GameSpec,
    OrderedState,
    PartitionState,
    Scheme,
    State,
    all_payoffs,
    apply_move,
    check_state,
    potential,
    total_profit,
)

_ZERO = Fraction(0)

DEFAULT_STATE_BUDGET = 10_000_000
STRONG_NASH_LIMIT = 8


def state_count(spec: GameSpec, *, expand_orderings: bool = False) -> int:
    """Closed-form size of the state space walked by :func:`enumerate_states`."""
    n, m = spec.n, spec.m
    if spec.scheme is not Scheme.LABOR_UNION:
        return m**n
    if not expand_orderings:
        return (m + 1) ** n
    # k affiliated players can be arranged into m ordered sequences in
    # k! * C(k+m-1, m-1) ways; the unaffiliated pool is unordered.
    return sum(comb(n, k) * factorial(k) * comb(k + m - 1, m - 1) for k in range(n + 1))


def enumerate_states(
    spec: GameSpec,
    *,
    expand_orderings: bool = False,
    budget: int = DEFAULT_STATE_BUDGET,
):
    """Yield every state exactly once, in lexicographic assignment order.

    Partition games yield :class:`PartitionState` over assignments in
    {1..m}**n.  Labor-union games yield :class:`OrderedState`: by default one
    canonical representative per shape (ascending arrival order within each
    party, assignments over {0..m}**n with 0 = unaffiliated); with
    ``expand_orderings=True`` every within-party arrival order of every shape.
    """
    total = state_count(spec, expand_orderings=expand_orderings)
    if total > budget:
        raise TooLarge(f"{total} states exceed the budget of {budget}")
    n, m = spec.n, spec.m
    if spec.scheme is not Scheme.LABOR_UNION:
        for assignment in itertools.product(range(1, m + 1), repeat=n):
            yield PartitionState(assignment)
        return
    for shape in itertools.product(range(0, m + 1), repeat=n):
        members = [tuple(i for i in range(1, n + 1) if shape[i - 1] == j) for j in range(1, m + 1)]
        unaffiliated = frozenset(i for i in range(1, n + 1) if shape[i - 1] == 0)
        if not expand_orderings:
            yield OrderedState(tuple(members), unaffiliated)
            continue
        for sequences in itertools.product(*(itertools.permutations(ms) for ms in members)):
            yield OrderedState(tuple(sequences), unaffiliated)


@dataclass(frozen=True)
class OptimalStructure:
    """A total-profit maximiser; for labor union the order witness is the
    canonical ascending one (total profit ignores arrival order)."""

    state: State
    assignment: tuple[int, ...]
    value: Fraction


def optimum(spec: GameSpec, *, budget: int = DEFAULT_STATE_BUDGET) -> OptimalStructure:
    """Argmax of total profit over all partition shapes, lex tie-break."""
    best: OptimalStructure | None = None
    for state in enumerate_states(spec, budget=budget):
        value = total_profit(spec, state)
        if best is None or value > best.value:
            assignment = state.shape() if isinstance(state, OrderedState) else state.assignment
            best = OptimalStructure(state, assignment, value)
    assert best is not None
    return best


# -- equilibrium classification -------------------------------------------------


@dataclass(frozen=True)
class StateClassification:
    is_nash: bool
    is_alpha_nash: bool
    is_strong_nash: bool | None = None


@dataclass(frozen=True)
class StrongDeviation:
    """A joint move where no coalition member loses and some member gains.

    Non-moving players may be counted into the coalition as free riders:
    a gaining non-mover refutes stability just as a gaining mover does.
    """

    moves: tuple[tuple[int, int], ...]
    resulting_state: State


def classify_state(
    spec: GameSpec,
    state: State,
    alpha: Fraction = _ZERO,
    *,
    strong: bool = False,
    strong_limit: int = STRONG_NASH_LIMIT,
) -> StateClassification:
    """Membership of the state in the Nash / alpha-Nash / strong-Nash sets.

    The strong check enumerates every coalition, every joint retargeting and
    (for ordered states) every arrival interleaving; it is guarded to
    n <= ``strong_limit``.
    """
    check_state(spec, state)
    is_nash = True
    is_alpha = True
    one_plus = 1 + Fraction(alpha)
    for player in range(1, spec.n + 1):
        _, current, _, best = _player_options(spec, state, player)
        if best > current:
            is_nash = False
        if best > one_plus * current:
            is_alpha = False
        if not is_nash and not is_alpha:
            break
    is_strong: bool | None = None
    if strong:
        if spec.n > strong_limit:
            raise TooLarge(f"strong-equilibrium check capped at n={strong_limit}")
        is_strong = strong_deviation(spec, state) is None
    return StateClassification(is_nash, is_alpha, is_strong)


def strong_deviation(spec: GameSpec, state: State) -> StrongDeviation | None:
    """A witness coalition deviation, or None when the state is strong-stable.

    A deviation succeeds when no mover is strictly worse off and someone
    (a mover, or a free-riding non-mover folded into the coalition) is
    strictly better off.  Ordered states remove all movers simultaneously
    (survivors close ranks preserving order) and try every arrival
    interleaving at each target party.
    """
    check_state(spec, state)
    base = all_payoffs(spec, state)
    players = range(1, spec.n + 1)
    if isinstance(state, PartitionState):
        for movers in _nonempty_subsets(spec.n):
            choices = [
                [t for t in range(1, spec.m + 1) if t != state.assignment[i - 1]] for i in movers
            ]
            for targets in itertools.product(*choices):
                assignment = list(state.assignment)
                for i, t in zip(movers, targets):
                    assignment[i - 1] = t
                candidate = PartitionState(tuple(assignment))
                witness = _deviation_wins(spec, candidate, base, movers, targets)
                if witness is not None:
                    return witness
        return None

    for movers in _nonempty_subsets(spec.n):
        mover_set = set(movers)
        stripped = [tuple(i for i in seq if i not in mover_set) for seq in state.sequences]
        base_unaff = state.unaffiliated - mover_set
        choices = [[t for t in range(0, spec.m + 1) if t != state.strategy_of(i)] for i in movers]
        for targets in itertools.product(*choices):
            arrivals = [[] for _ in range(spec.m)]
            unaffiliated = set(base_unaff)
            for i, t in zip(movers, targets):
                if t == 0:
                    unaffiliated.add(i)
                else:
                    arrivals[t - 1].append(i)
            for orders in itertools.product(*(itertools.permutations(a) for a in arrivals)):
                sequences = tuple(stripped[j] + orders[j] for j in range(spec.m))
                candidate = OrderedState(sequences, frozenset(unaffiliated))
                witness = _deviation_wins(spec, candidate, base, movers, targets)
                if witness is not None:
                    return witness
    return None


def _deviation_wins(spec, candidate, base, movers, targets) -> StrongDeviation | None:
    after = all_payoffs(spec, candidate)
    mover_set = set(movers)
    someone_gains = False
    for i in movers:
        if after[i - 1] < base[i - 1]:
            return None
        if after[i - 1] > base[i - 1]:
            someone_gains = True
    if not someone_gains:
        someone_gains = any(
            after[i - 1] > base[i - 1] for i in range(1, spec.n + 1) if i not in mover_set
        )
    if someone_gains:
        return StrongDeviation(tuple(zip(movers, targets)), candidate)
    return None


def _nonempty_subsets(n: int):
    for mask in range(1, 1 << n):
        yield tuple(i for i in range(1, n + 1) if mask & (1 << (i - 1)))


# -- prices of anarchy and stability --------------------------------------------


@dataclass(frozen=True)
class EquilibriumReport:
    alpha: Fraction
    equilibria: tuple[State, ...]
    worst_value: Fraction
    best_value: Fraction
    poa: Fraction
    pos: Fraction
    optimum: OptimalStructure
    strong_equilibria: tuple[State, ...] | None = None


def _chunk_classify(args) -> list[tuple[int, bool]]:
    spec, states, alpha = args
    one_plus = 1 + alpha
    out = []
    for idx, state in states:
        ok = True
        for player in range(1, spec.n + 1):
            _, current, _, best = _player_options(spec, state, player)
            if best > one_plus * current:
                ok = False
                break
        out.append((idx, ok))
    return out


def prices(
    spec: GameSpec,
    alpha: Fraction = _ZERO,
    *,
    include_strong: bool = False,
    budget: int = DEFAULT_STATE_BUDGET,
    threads: int = 1,
) -> EquilibriumReport:
    """Exhaustive alpha-Nash filter plus the Opt/worst and Opt/best ratios.

    alpha = 0 gives the plain price of anarchy and stability.  Labor-union
    filtering quantifies over every within-party arrival order.  Results are
    deterministic regardless of ``threads``.
    """
    alpha = Fraction(alpha)
    best = optimum(spec, budget=budget)
    states = list(
        enumerate_states(
            spec, expand_orderings=spec.scheme is Scheme.LABOR_UNION, budget=budget
        )
    )
    flags: list[bool]
    if threads > 1 and len(states) > 256:
        import multiprocessing

        indexed = list(enumerate(states))
        chunk = (len(indexed) + threads - 1) // threads
        jobs = [(spec, indexed[k : k + chunk], alpha) for k in range(0, len(indexed), chunk)]
        flags = [False] * len(states)
        with multiprocessing.Pool(threads) as pool:
            for part in pool.map(_chunk_classify, jobs):
                for idx, ok in part:
                    flags[idx] = ok
    else:
        flags = [ok for _, ok in _chunk_classify((spec, list(enumerate(states)), alpha))]

    equilibria = [s for s, ok in zip(states, flags) if ok]
    if not equilibria:
        raise NoEquilibriumFound(
            f"no {'alpha-' if alpha else ''}Nash equilibrium among {len(states)} states"
        )
    values = [total_profit(spec, s) for s in equilibria]
    worst, best_eq = min(values), max(values)
    if best.value == 0:
        poa = pos = Fraction(1)
    elif worst == 0:
        raise RuntimeError("equilibrium with zero profit in a game with positive optimum")
    else:
        poa, pos = best.value / worst, best.value / best_eq

    strong: tuple[State, ...] | None = None
    if include_strong:
        strong = tuple(s for s in equilibria if strong_deviation(spec, s) is None)
    return EquilibriumReport(
        alpha=alpha,
        equilibria=tuple(equilibria),
        worst_value=worst,
        best_value=best_eq,
        poa=poa,
        pos=pos,
        optimum=best,
        strong_equilibria=strong,
    )


def equilibrium_shapes(spec: GameSpec, alpha: Fraction = _ZERO, *, budget: int = DEFAULT_STATE_BUDGET):
    """Labor-union convenience: shapes whose *every* arrival order is an
    alpha-equilibrium (the per-ordering results are the primary notion)."""
    if spec.scheme is not Scheme.LABOR_UNION:
        raise TooLarge("shape summaries only make sense for ordered (labor-union) games")
    report = prices(spec, alpha, budget=budget)
    counts: dict[tuple[int, ...], int] = {}
    for state in enumerate_states(spec, expand_orderings=True, budget=budget):
        counts[state.shape()] = counts.get(state.shape(), 0) + 1
    eq_counts: dict[tuple[int, ...], int] = {}
    for s in report.equilibria:
        eq_counts[s.shape()] = eq_counts.get(s.shape(), 0) + 1
    return tuple(shape for shape, total in counts.items() if eq_counts.get(shape, 0) == total)


# -- niceness --------------------------------------------------------------------


@dataclass(frozen=True)
class NicenessWitness:
    check: str
    state: State
    player: int | None
    target: int | None
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class NicenessReport:
    beta_tested: Fraction
    beta_nice_holds: bool
    perfect_holds: bool
    exact_potential_holds: bool
    witnesses: tuple[NicenessWitness, ...]


def verify_niceness(
    spec: GameSpec,
    beta: Fraction,
    *,
    budget: int = DEFAULT_STATE_BUDGET,
    witness_cap: int = 100,
) -> NicenessReport:
    """Exhaustive verdicts on the potential-game quality conditions.

    Over every state (every ordering, for labor union) and every unilateral
    move, with f = total profit and Phi the scheme potential:

    - ``perfect_holds``: f(S) >= sum of payoffs in S, and improvement moves
      satisfy the sandwich f-change >= Phi-change >= payoff-change;
    - ``exact_potential_holds``: Phi-change equals payoff-change on *all*
      unilateral moves (reported separately, expected for fair-value and
      shapley schemes);
    - ``beta_nice_holds``: beta*f(S) + total best-response gain >= Opt.
    """
    beta = Fraction(beta)
    expand = spec.scheme is Scheme.LABOR_UNION
    states = list(enumerate_states(spec, expand_orderings=expand, budget=budget))
    info: dict[State, tuple[Fraction, Fraction, tuple[Fraction, ...]]] = {}
    for state in states:
        info[state] = (total_profit(spec, state), potential(spec, state), all_payoffs(spec, state))
    opt_value = optimum(spec, budget=budget).value

    beta_nice = perfect = exact = True
    witnesses: list[NicenessWitness] = []

    def note(check, state, player, target, lhs, rhs):
        if len(witnesses) < witness_cap:
            witnesses.append(NicenessWitness(check, state, player, target, lhs, rhs))

    for state in states:
        tp, pot, payoffs = info[state]
        welfare = sum(payoffs, _ZERO)
        if tp < welfare:
            perfect = False
            note("welfare", state, None, None, tp, welfare)
        total_gain = _ZERO
        for player in range(1, spec.n + 1):
            current_strategy = state.strategy_of(player)
            best_value = payoffs[player - 1]
            for target in spec.strategies():
                if target == current_strategy:
                    continue
                moved = apply_move(state, player, target, m=spec.m)
                tp2, pot2, payoffs2 = info[moved]
                gain = payoffs2[player - 1] - payoffs[player - 1]
                if pot2 - pot != gain:
                    exact = False
                    note("exact_potential", state, player, target, pot2 - pot, gain)
                if gain > 0:
                    if tp2 - tp < pot2 - pot:
                        perfect = False
                        note("chain_profit_vs_potential", state, player, target, tp2 - tp, pot2 - pot)
                    if pot2 - pot < gain:
                        perfect = False
                        note("chain_potential_vs_payoff", state, player, target, pot2 - pot, gain)
                if payoffs2[player - 1] > best_value:
                    best_value = payoffs2[player - 1]
            total_gain += best_value - payoffs[player - 1]
        if beta * tp + total_gain < opt_value:
            beta_nice = False
            note("beta_nice", state, None, None, beta * tp + total_gain, opt_value)

    return NicenessReport(beta, beta_nice, perfect, exact, tuple(witnesses))
