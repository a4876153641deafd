"""Game states, payoffs, total profit, and potential functions.

A game couples n players with m parties (m <= n), one monotone submodular
valuation per party, and one of three marginal-utility payment schemes:

- fair value: a player is paid its marginal contribution to its party's
  full current membership;
- labor union: parties remember arrival order and a player is paid its
  marginal contribution to the members that arrived before it (frozen
  against later arrivals); unaffiliated players earn 0;
- shapley: a player is paid its expected marginal contribution over a
  uniformly random arrival order of its party, computed by exact subset
  enumeration.

Fair-value and shapley states are plain partitions; labor-union states carry
per-party arrival sequences plus an unaffiliated pool.  States are immutable
values: :func:`apply_move` returns a new state.  All payoff computations are
pure, so parallel evaluation over states needs no coordination.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .errors import InvalidArgument, NoOpMove, SchemeMismatch, TooLarge
from .valuations import Valuation, mask_members

_ZERO = Fraction(0)

# Exact shapley payoffs enumerate 2**(party size - 1) subsets; this guard
# keeps a typo from turning into an hour of CPU.  The CLI can override it.
shapley_party_limit = 20


class Scheme(enum.Enum):
    FAIR_VALUE = "fair_value"
    SHAPLEY = "shapley"
    LABOR_UNION = "labor_union"


@dataclass(frozen=True)
class GameSpec:
    """n players, m parties, per-party valuations, and a payoff scheme."""

    n: int
    m: int
    valuations: tuple[Valuation, ...]
    scheme: Scheme

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise InvalidArgument("need at least one player and one party")
        if self.m > self.n:
            raise InvalidArgument(f"m={self.m} parties exceed n={self.n} players; m <= n is required")
        if len(self.valuations) != self.m:
            raise InvalidArgument(f"expected {self.m} valuations, got {len(self.valuations)}")
        for j, v in enumerate(self.valuations, start=1):
            if v.n != self.n:
                raise InvalidArgument(f"valuation {j} is over {v.n} players, game has {self.n}")

    @property
    def allow_unaffiliated(self) -> bool:
        # Strategy 0 exists exactly in the labor-union scheme.
        return self.scheme is Scheme.LABOR_UNION

    def strategies(self) -> range:
        return range(0, self.m + 1) if self.allow_unaffiliated else range(1, self.m + 1)


@dataclass(frozen=True)
class PartitionState:
    """Unordered assignment: entry i-1 is the party of player i (1-based)."""

    assignment: tuple[int, ...]

    def __post_init__(self):
        for i, s in enumerate(self.assignment, start=1):
            if not isinstance(s, int) or isinstance(s, bool) or s < 1:
                raise InvalidArgument(f"player {i} carries invalid party {s!r}")

    @property
    def n(self) -> int:
        return len(self.assignment)

    def strategy_of(self, player: int) -> int:
        return self.assignment[player - 1]

    def party_members(self, party: int) -> tuple[int, ...]:
        return tuple(i for i, s in enumerate(self.assignment, start=1) if s == party)

    def party_mask(self, party: int) -> int:
        mask = 0
        for i, s in enumerate(self.assignment):
            if s == party:
                mask |= 1 << i
        return mask


@dataclass(frozen=True)
class OrderedState:
    """Per-party arrival sequences plus the unaffiliated pool (strategy 0)."""

    sequences: tuple[tuple[int, ...], ...]
    unaffiliated: frozenset[int]

    def __post_init__(self):
        seen: set[int] = set()
        for seq in self.sequences:
            for i in seq:
                if not isinstance(i, int) or isinstance(i, bool) or i < 1 or i in seen:
                    raise InvalidArgument(f"player {i!r} repeated or invalid in arrival sequences")
                seen.add(i)
        if seen & self.unaffiliated:
            raise InvalidArgument("players cannot be both affiliated and unaffiliated")

    @classmethod
    def from_sequences(cls, sequences, n: int) -> "OrderedState":
        seqs = tuple(tuple(seq) for seq in sequences)
        placed = {i for seq in seqs for i in seq}
        return cls(seqs, frozenset(range(1, n + 1)) - placed)

    @property
    def n(self) -> int:
        return sum(len(seq) for seq in self.sequences) + len(self.unaffiliated)

    @property
    def m(self) -> int:
        return len(self.sequences)

    def strategy_of(self, player: int) -> int:
        for j, seq in enumerate(self.sequences, start=1):
            if player in seq:
                return j
        if player in self.unaffiliated:
            return 0
        raise InvalidArgument(f"player {player} not in this state")

    def party_members(self, party: int) -> tuple[int, ...]:
        return self.sequences[party - 1]

    def party_mask(self, party: int) -> int:
        mask = 0
        for i in self.sequences[party - 1]:
            mask |= 1 << (i - 1)
        return mask

    def predecessor_mask(self, player: int) -> int:
        """Members of the player's party that arrived before it."""
        for seq in self.sequences:
            mask = 0
            for i in seq:
                if i == player:
                    return mask
                mask |= 1 << (i - 1)
        raise InvalidArgument(f"player {player} is not affiliated")

    def shape(self) -> tuple[int, ...]:
        """Strategy vector (0 for unaffiliated), forgetting arrival order."""
        out = [0] * self.n
        for j, seq in enumerate(self.sequences, start=1):
            for i in seq:
                out[i - 1] = j
        return tuple(out)


State = PartitionState | OrderedState


def check_state(spec: GameSpec, state: State) -> None:
    """Raise unless the state matches the spec's scheme and invariants."""
    if spec.scheme is Scheme.LABOR_UNION:
        if not isinstance(state, OrderedState):
            raise SchemeMismatch("labor-union games need OrderedState (arrival order matters)")
        if state.m != spec.m or state.n != spec.n:
            raise InvalidArgument(f"state shaped for n={state.n}, m={state.m}; game has n={spec.n}, m={spec.m}")
        for i in list(state.unaffiliated) + [i for seq in state.sequences for i in seq]:
            if not 1 <= i <= spec.n:
                raise InvalidArgument(f"player {i} outside 1..{spec.n}")
    else:
        if not isinstance(state, PartitionState):
            raise SchemeMismatch(f"{spec.scheme.value} games need PartitionState")
        if state.n != spec.n:
            raise InvalidArgument(f"state has {state.n} players, game has {spec.n}")
        for i, s in enumerate(state.assignment, start=1):
            if not 1 <= s <= spec.m:
                raise InvalidArgument(f"player {i} assigned to party {s}, game has m={spec.m}")


def _check_player(spec: GameSpec, player: int) -> None:
    if not isinstance(player, int) or isinstance(player, bool) or not 1 <= player <= spec.n:
        raise InvalidArgument(f"player {player!r} outside 1..{spec.n}")


# -- shapley machinery --------------------------------------------------------


def _shapley_marginal(valuation: Valuation, party_mask: int, player: int) -> Fraction:
    """Shapley share of `player` within the party given by `party_mask`.

    party_mask must contain the player.  Cost 2**(|party|-1) table lookups,
    cached per (mask, player) on the valuation.
    """
    cache = getattr(valuation, "_shapley_marginals", None)
    if cache is None:
        cache = valuation._shapley_marginals = {}
    key = (party_mask, player)
    hit = cache.get(key)
    if hit is not None:
        return hit

    size = party_mask.bit_count()
    if size > shapley_party_limit:
        raise TooLarge(f"shapley party of {size} players exceeds the limit of {shapley_party_limit}")
    bit = 1 << (player - 1)
    rest = party_mask & ~bit
    table = valuation.dense_table() if valuation.n <= 16 else None
    value = table.__getitem__ if table is not None else valuation.value_of_mask
    fact = [factorial(k) for k in range(size + 1)]
    coeff = [Fraction(fact[k] * fact[size - k - 1], fact[size]) for k in range(size)]

    total = _ZERO
    sub = rest
    while True:
        total += coeff[sub.bit_count()] * (value(sub | bit) - value(sub))
        if sub == 0:
            break
        sub = (sub - 1) & rest
    cache[key] = total
    return total


def _shapley_party_potential(valuation: Valuation, party_mask: int) -> Fraction:
    """Per-party potential term: sum over nonempty subsets Q of the party of
    (|Q|-1)!(|party|-|Q|)!/|party|! times v(Q).

    The empty subset is excluded: its coefficient is undefined and v(empty)=0,
    the only reading under which the telescoping potential argument works.
    """
    cache = getattr(valuation, "_shapley_potentials", None)
    if cache is None:
        cache = valuation._shapley_potentials = {}
    hit = cache.get(party_mask)
    if hit is not None:
        return hit

    size = party_mask.bit_count()
    if size > shapley_party_limit:
        raise TooLarge(f"shapley party of {size} players exceeds the limit of {shapley_party_limit}")
    if size == 0:
        cache[party_mask] = _ZERO
        return _ZERO
    table = valuation.dense_table() if valuation.n <= 16 else None
    value = table.__getitem__ if table is not None else valuation.value_of_mask
    fact = [factorial(k) for k in range(size + 1)]
    coeff = [None] + [Fraction(fact[k - 1] * fact[size - k], fact[size]) for k in range(1, size + 1)]

    total = _ZERO
    sub = party_mask
    while sub:
        total += coeff[sub.bit_count()] * value(sub)
        sub = (sub - 1) & party_mask
    cache[party_mask] = total
    return total


# -- payoffs, total profit, potential -----------------------------------------


def payoff(spec: GameSpec, state: State, player: int) -> Fraction:
    """The player's payment under the spec's scheme in the given state."""
    check_state(spec, state)
    _check_player(spec, player)
    return _payoff_unchecked(spec, state, player)


def _payoff_unchecked(spec: GameSpec, state: State, player: int) -> Fraction:
    bit = 1 << (player - 1)
    if spec.scheme is Scheme.LABOR_UNION:
        if player in state.unaffiliated:
            return _ZERO
        party = state.strategy_of(player)
        v = spec.valuations[party - 1]
        preds = state.predecessor_mask(player)
        return v.value_of_mask(preds | bit) - v.value_of_mask(preds)
    party = state.assignment[player - 1]
    v = spec.valuations[party - 1]
    party_mask = state.party_mask(party)
    if spec.scheme is Scheme.FAIR_VALUE:
        return v.value_of_mask(party_mask) - v.value_of_mask(party_mask & ~bit)
    return _shapley_marginal(v, party_mask, player)


def all_payoffs(spec: GameSpec, state: State) -> tuple[Fraction, ...]:
    """Payoff vector u_1..u_n; every entry is non-negative."""
    check_state(spec, state)
    return tuple(_payoff_unchecked(spec, state, i) for i in range(1, spec.n + 1))


def total_profit(spec: GameSpec, state: State) -> Fraction:
    """Sum of party values; unaffiliated players contribute to no party."""
    check_state(spec, state)
    total = _ZERO
    for j in range(1, spec.m + 1):
        total += spec.valuations[j - 1].value_of_mask(state.party_mask(j))
    return total


def potential(spec: GameSpec, state: State) -> Fraction:
    """Exact potential for fair-value/shapley; total profit for labor union.

    Fair-value and labor-union games use the total profit itself.  Shapley
    games use the weighted subset sum whose unilateral differences equal
    payoff differences exactly.
    """
    check_state(spec, state)
    if spec.scheme is Scheme.SHAPLEY:
        total = _ZERO
        for j in range(1, spec.m + 1):
            total += _shapley_party_potential(spec.valuations[j - 1], state.party_mask(j))
        return total
    return total_profit(spec, state)


# -- moves ---------------------------------------------------------------------


def apply_move(state: State, player: int, target: int, *, m: int | None = None) -> State:
    """Return the state after `player` switches to `target`.

    Partition states take targets 1..m.  Ordered states also take 0
    (unaffiliation); a departing player's successors shift toward the head
    preserving relative order, and a joining player is appended at the tail
    of the target sequence (rejoining counts as a fresh arrival).  The input
    state is never modified.
    """
    if isinstance(state, PartitionState):
        if not 1 <= player <= state.n:
            raise InvalidArgument(f"player {player!r} outside 1..{state.n}")
        upper = m if m is not None else max(state.assignment)
        if not isinstance(target, int) or isinstance(target, bool) or not 1 <= target <= upper:
            raise InvalidArgument(f"target party {target!r} outside 1..{upper}")
        if state.assignment[player - 1] == target:
            raise NoOpMove(f"player {player} already plays {target}")
        changed = list(state.assignment)
        changed[player - 1] = target
        return PartitionState(tuple(changed))

    if isinstance(state, OrderedState):
        if not 1 <= player <= state.n:
            raise InvalidArgument(f"player {player!r} outside 1..{state.n}")
        if not isinstance(target, int) or isinstance(target, bool) or not 0 <= target <= state.m:
            raise InvalidArgument(f"target {target!r} outside 0..{state.m}")
        current = state.strategy_of(player)
        if current == target:
            raise NoOpMove(f"player {player} already plays {target}")
        sequences = [tuple(i for i in seq if i != player) for seq in state.sequences]
        unaffiliated = state.unaffiliated - {player}
        if target == 0:
            unaffiliated = unaffiliated | {player}
        else:
            sequences[target - 1] = sequences[target - 1] + (player,)
        return OrderedState(tuple(sequences), frozenset(unaffiliated))

    raise SchemeMismatch(f"not a game state: {state!r}")
