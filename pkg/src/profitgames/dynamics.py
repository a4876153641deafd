"""Improvement dynamics and convergence-step bounds.

A move is an improvement when it strictly raises the mover's payoff, and an
alpha-improvement when it raises it by strictly more than a factor 1+alpha.
A player is *eligible* when its best response is an alpha-improvement (for
alpha=0, any strict improvement); pure alpha-improvements that are not best
responses are never taken.  Three step selectors are provided:

- ``basic``: the eligible player with the largest absolute improvement moves
  (ties: lowest player index, then lowest target strategy);
- ``roundrobin``: players are scanned cyclically and the next eligible one
  moves; players with no eligible move are skipped without consuming a step;
- ``random``: a seeded RNG picks uniformly among the eligible players.

Every recorded step strictly increases the scheme's potential, so traces on
these games always terminate.  Runs are strictly sequential; independent
runs over different configs or initial states may execute in parallel.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from mpmath import iv, mp

from .errors import InvalidArgument
from .games import (
    GameSpec,
    OrderedState,
    Scheme,
    State,
    _payoff_unchecked,
    _shapley_marginal,
    apply_move,
    check_state,
    potential,
    total_profit,
)

_ZERO = Fraction(0)

SELECTORS = ("basic", "roundrobin", "random")


@dataclass(frozen=True)
class DynamicsConfig:
    """alpha = 0 gives the plain improvement dynamic; seed feeds ``random``."""

    alpha: Fraction = _ZERO
    selector: str = "basic"
    seed: int = 0
    max_steps: int = 10_000

    def __post_init__(self):
        if self.alpha < 0:
            raise InvalidArgument("alpha must be >= 0")
        if self.selector not in SELECTORS:
            raise InvalidArgument(f"selector must be one of {SELECTORS}")
        if self.max_steps < 1:
            raise InvalidArgument("max_steps must be >= 1")


@dataclass(frozen=True)
class PlayerImprovement:
    player: int
    best_target: int
    delta: Fraction


@dataclass(frozen=True)
class ImprovementProfile:
    per_player: tuple[PlayerImprovement, ...]
    total_delta: Fraction


@dataclass(frozen=True)
class TraceStep:
    index: int
    mover: int
    source: int
    target: int
    payoff_before: Fraction
    payoff_after: Fraction
    potential_after: Fraction
    total_profit_after: Fraction


@dataclass(frozen=True)
class Trace:
    initial_state: State
    initial_potential: Fraction
    initial_total_profit: Fraction
    steps: tuple[TraceStep, ...]
    final_state: State
    converged: bool
    truncated: bool

    def profits(self) -> tuple[Fraction, ...]:
        """Total profit before any move, then after each recorded step."""
        return (self.initial_total_profit,) + tuple(s.total_profit_after for s in self.steps)


def _candidate_payoff(spec: GameSpec, state: State, player: int, target: int) -> Fraction:
    """The player's payoff if it unilaterally switches to `target`."""
    if target == 0:
        return _ZERO
    bit = 1 << (player - 1)
    v = spec.valuations[target - 1]
    mask = state.party_mask(target)  # excludes the player: target != current
    if spec.scheme is Scheme.SHAPLEY:
        return _shapley_marginal(v, mask | bit, player)
    # Fair value sees the full new membership; a labor-union joiner is
    # appended at the tail, so its predecessors are the current members.
    return v.value_of_mask(mask | bit) - v.value_of_mask(mask)


def _player_options(spec: GameSpec, state: State, player: int) -> tuple[int, Fraction, int, Fraction]:
    """(current strategy, current payoff, best strategy, best payoff)."""
    current = state.strategy_of(player)
    current_payoff = _payoff_unchecked(spec, state, player)
    best_target, best_value = current, current_payoff
    for target in spec.strategies():
        if target == current:
            continue
        value = _candidate_payoff(spec, state, player, target)
        if value > best_value:
            best_target, best_value = target, value
    return current, current_payoff, best_target, best_value


def best_response(spec: GameSpec, state: State, player: int) -> tuple[int, Fraction]:
    """Best strategy for the player with others fixed, and its gain.

    Returns (current strategy, 0) when staying already maximises the payoff.
    Among strictly better strategies, ties break toward the lowest index.
    """
    check_state(spec, state)
    _, current_payoff, best_target, best_value = _player_options(spec, state, player)
    return best_target, best_value - current_payoff


def improvement_profile(spec: GameSpec, state: State) -> ImprovementProfile:
    """Per-player best responses and gains; total is their sum."""
    check_state(spec, state)
    entries = []
    total = _ZERO
    for player in range(1, spec.n + 1):
        _, current_payoff, target, value = _player_options(spec, state, player)
        entries.append(PlayerImprovement(player, target, value - current_payoff))
        total += value - current_payoff
    return ImprovementProfile(tuple(entries), total)


def _eligible(spec: GameSpec, state: State, alpha: Fraction) -> list[PlayerImprovement]:
    """Players whose best response improves by strictly more than 1+alpha."""
    out = []
    for player in range(1, spec.n + 1):
        _, current_payoff, target, value = _player_options(spec, state, player)
        if value > (1 + alpha) * current_payoff:
            out.append(PlayerImprovement(player, target, value - current_payoff))
    return out


def step(
    spec: GameSpec,
    state: State,
    config: DynamicsConfig,
    *,
    cursor: int = 1,
    rng: random.Random | None = None,
) -> tuple[State, PlayerImprovement, int] | None:
    """One move of the configured dynamic, or None when no player is eligible.

    A None return means the state is an alpha-Nash equilibrium (a plain Nash
    equilibrium when alpha=0).  ``cursor`` carries the round-robin scan
    position between calls; the returned value feeds the next call.
    """
    check_state(spec, state)
    eligible = _eligible(spec, state, config.alpha)
    if not eligible:
        return None
    if config.selector == "basic":
        chosen = max(eligible, key=lambda e: (e.delta, -e.player))
    elif config.selector == "roundrobin":
        by_player = {e.player: e for e in eligible}
        chosen = None
        for offset in range(spec.n):
            candidate = (cursor - 1 + offset) % spec.n + 1
            if candidate in by_player:
                chosen = by_player[candidate]
                break
        assert chosen is not None
    else:
        if rng is None:
            rng = random.Random(config.seed)
        chosen = eligible[rng.randrange(len(eligible))]
    new_state = apply_move(state, chosen.player, chosen.best_target, m=spec.m)
    return new_state, chosen, chosen.player % spec.n + 1


def run(spec: GameSpec, initial_state: State, config: DynamicsConfig) -> Trace:
    """Iterate the dynamic until convergence or ``max_steps``.

    Equal (spec, initial state, config including seed) always produce the
    identical trace.  The recorded potential is strictly increasing.
    """
    check_state(spec, initial_state)
    rng = random.Random(config.seed)
    state = initial_state
    cursor = 1
    steps: list[TraceStep] = []
    converged = False
    while len(steps) < config.max_steps:
        outcome = step(spec, state, config, cursor=cursor, rng=rng)
        if outcome is None:
            converged = True
            break
        new_state, move, cursor = outcome
        payoff_before = _payoff_unchecked(spec, state, move.player)
        source = state.strategy_of(move.player)
        state = new_state
        steps.append(
            TraceStep(
                index=len(steps) + 1,
                mover=move.player,
                source=source,
                target=move.best_target,
                payoff_before=payoff_before,
                payoff_after=payoff_before + move.delta,
                potential_after=potential(spec, state),
                total_profit_after=total_profit(spec, state),
            )
        )
    if not converged and _eligible(spec, state, config.alpha) == []:
        converged = True
    return Trace(
        initial_state=initial_state,
        initial_potential=potential(spec, initial_state),
        initial_total_profit=total_profit(spec, initial_state),
        steps=tuple(steps),
        final_state=state,
        converged=converged,
        truncated=not converged,
    )


# -- convergence bounds --------------------------------------------------------


@dataclass(frozen=True)
class ConvergenceBound:
    """After ``steps`` moves the tracked quantity is at least ``guaranteed_value``."""

    a: Fraction
    b: Fraction
    epsilon: Fraction
    steps: int
    guaranteed_value: Fraction


def ceil_scaled_log(a: Fraction, epsilon: Fraction) -> int:
    """Smallest integer >= a * ln(1/epsilon), for epsilon in (0, 1).

    Interval arithmetic pins the ceiling; if an interval straddles an
    integer even at high precision, the upper end wins (the bound must
    never under-report).
    """
    if not 0 < epsilon < 1:
        raise InvalidArgument("epsilon must lie strictly between 0 and 1")
    if a <= 0:
        raise InvalidArgument("a must be positive")
    result = None
    for dps in (40, 80, 160):
        iv.dps = dps
        value = (
            iv.mpf(a.numerator)
            / iv.mpf(a.denominator)
            * iv.log(iv.mpf(epsilon.denominator) / iv.mpf(epsilon.numerator))
        )
        low = int(mp.ceil(value.a))
        high = int(mp.ceil(value.b))
        if low == high:
            return max(low, 1)
        result = high
    return max(result, 1)


def ceil_log_ratio(base: Fraction, value: Fraction) -> int:
    """Smallest integer k with base**k >= value (exact integer arithmetic)."""
    if base <= 1:
        raise InvalidArgument("base must exceed 1")
    k = 0
    acc = Fraction(1)
    while acc < value:
        acc *= base
        k += 1
    return k


def contraction_bound(a: Fraction, b: Fraction, epsilon: Fraction) -> ConvergenceBound:
    """Raw bound: any dynamic whose per-step gain is at least b - f/a reaches
    f >= a*b*(1-epsilon) within ceil(a*ln(1/epsilon)) steps."""
    a, b, epsilon = Fraction(a), Fraction(b), Fraction(epsilon)
    if b <= 0:
        raise InvalidArgument("b must be positive")
    return ConvergenceBound(a, b, epsilon, ceil_scaled_log(a, epsilon), a * b * (1 - epsilon))


def convergence_bounds(
    n: int,
    beta: Fraction,
    alpha: Fraction,
    epsilon: Fraction,
    opt_value: Fraction,
) -> dict[str, ConvergenceBound]:
    """Step bounds for the basic dynamic on a perfect beta-nice game.

    "nash" uses a = n/beta and guarantees (opt/beta)(1-epsilon); "alpha_nash"
    uses a = n/(beta+alpha) and guarantees (opt/(beta+alpha))(1-epsilon).
    The two coincide at alpha = 0.
    """
    beta, alpha, epsilon, opt_value = (
        Fraction(beta),
        Fraction(alpha),
        Fraction(epsilon),
        Fraction(opt_value),
    )
    if n < 1:
        raise InvalidArgument("n must be >= 1")
    if beta <= 0:
        raise InvalidArgument("beta must be positive")
    if alpha < 0:
        raise InvalidArgument("alpha must be >= 0")
    if opt_value <= 0:
        raise InvalidArgument("opt_value must be positive")
    b = Fraction(opt_value, n)
    return {
        "nash": contraction_bound(Fraction(n) / beta, b, epsilon),
        "alpha_nash": contraction_bound(Fraction(n) / (beta + alpha), b, epsilon),
    }


# -- trace serialisation ---------------------------------------------------------

TRACE_COLUMNS = (
    "step",
    "mover",
    "from",
    "to",
    "payoff_before",
    "payoff_after",
    "potential_after",
    "total_profit_after",
)


def trace_rows(trace: Trace) -> list[dict[str, object]]:
    """One row per recorded step, rationals as canonical "p/q" strings."""
    from .rationals import format_rational

    return [
        {
            "step": s.index,
            "mover": s.mover,
            "from": s.source,
            "to": s.target,
            "payoff_before": format_rational(s.payoff_before),
            "payoff_after": format_rational(s.payoff_after),
            "potential_after": format_rational(s.potential_after),
            "total_profit_after": format_rational(s.total_profit_after),
        }
        for s in trace.steps
    ]


def trace_jsonl(trace: Trace) -> str:
    """JSONL text: one step object per line, LF newlines, no summary line."""
    import json

    lines = [json.dumps(row, separators=(", ", ": ")) for row in trace_rows(trace)]
    return "".join(line + "\n" for line in lines)


def trace_csv(trace: Trace) -> str:
    """CSV text with a fixed header row, LF newlines."""
    rows = [",".join(TRACE_COLUMNS)]
    for row in trace_rows(trace):
        rows.append(",".join(str(row[c]) for c in TRACE_COLUMNS))
    return "".join(r + "\n" for r in rows)
