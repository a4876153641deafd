"""Edge-coverage games on weighted graphs and their closed-form payoffs.

A weighted graph over the player set induces the coverage valuation
v(S) = total weight of edges with at least one endpoint in S (each edge
counted once).  Sharing that valuation across every party yields a
succinct profit-sharing game; for ordinary (non-hyper) edges the payoffs
have closed forms in terms of an incident-weight split:

- ``to_predecessors`` / ``to_successors``: weight of edges from the player
  to earlier / later arrivals within its own party (order only matters in
  the labor-union scheme; partition states carry just their sum);
- ``cut``: weight of edges leaving the player's party.

The shapley payoff equals within/2 + cut, and the labor-union payoff equals
to_successors + cut; both identities are verified against the generic
computation.  The analogous fair-value closed form within/2 + cut does NOT
match the generic fair-value marginal, which works out to the cut weight
alone (a co-member keeps shared edges covered); :func:`cross_check` reports
both sides instead of picking one.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from .errors import InvalidArgument, Unsupported
from .games import (
    GameSpec,
    OrderedState,
    PartitionState,
    Scheme,
    State,
    payoff,
    total_profit,
)
from .rationals import parse_rational
from .valuations import CoverageValuation, coalition_mask, mask_members

_ZERO = Fraction(0)


@dataclass(frozen=True)
class WeightedGraph:
    """Vertices 1..n; edges are endpoint sets of size >= 2 with positive weight."""

    n: int
    edges: tuple[tuple[frozenset[int], Fraction], ...]

    def __post_init__(self):
        seen = set()
        for ends, weight in self.edges:
            if len(ends) < 2:
                raise InvalidArgument(f"edge {set(ends)} needs at least two endpoints")
            for i in ends:
                if not 1 <= i <= self.n:
                    raise InvalidArgument(f"endpoint {i} outside 1..{self.n}")
            if ends in seen:
                raise InvalidArgument(f"duplicate edge {set(ends)}")
            if weight <= 0:
                raise InvalidArgument(f"edge {set(ends)} has non-positive weight {weight}")
            seen.add(ends)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[Iterable[int], Fraction | int | str]]):
        return cls(n, tuple((frozenset(ends), parse_rational(w)) for ends, w in edges))

    def is_ordinary(self) -> bool:
        return all(len(ends) == 2 for ends, _ in self.edges)

    def total_weight(self) -> Fraction:
        return sum((w for _, w in self.edges), _ZERO)

    def incident_weight(self, player: int) -> Fraction:
        return sum((w for ends, w in self.edges if player in ends), _ZERO)


def coverage_valuation(graph: WeightedGraph) -> CoverageValuation:
    """v(S) = total weight of edges touching S; monotone submodular.

    The valuation is cached on the graph so repeated analyses share its
    derived tables.
    """
    cached = getattr(graph, "_coverage", None)
    if cached is None:
        masks = tuple((coalition_mask(ends, graph.n), w) for ends, w in graph.edges)
        cached = CoverageValuation(graph.n, masks)
        object.__setattr__(graph, "_coverage", cached)
    return cached


@dataclass(frozen=True)
class GraphDecomposition:
    """Incident-weight split of one affiliated player.

    For ordered states ``to_predecessors`` and ``to_successors`` split the
    within-party weight by arrival order; for partition states only their
    sum ``within_party`` is defined and the split fields are None.  Always:
    within_party + cut = the player's total incident weight.
    """

    to_predecessors: Fraction | None
    to_successors: Fraction | None
    within_party: Fraction
    cut: Fraction


def decompose(graph: WeightedGraph, state: State, player: int) -> GraphDecomposition:
    """Split the player's incident edge weight by its party and arrival order.

    Ordinary graphs only (hyperedges have no two-sided reading); the player
    must be affiliated.
    """
    if not graph.is_ordinary():
        raise Unsupported("edge splits are defined for ordinary two-endpoint edges only")
    if isinstance(state, OrderedState):
        strategy = state.strategy_of(player)
        if strategy == 0:
            raise InvalidArgument(f"player {player} is unaffiliated")
        sequence = state.party_members(strategy)
        position = sequence.index(player)
        earlier = set(sequence[:position])
        later = set(sequence[position + 1 :])
        preds = succs = cut = _ZERO
        for ends, weight in graph.edges:
            if player not in ends:
                continue
            (other,) = ends - {player}
            if other in earlier:
                preds += weight
            elif other in later:
                succs += weight
            else:
                cut += weight
        return GraphDecomposition(preds, succs, preds + succs, cut)
    if isinstance(state, PartitionState):
        party = state.strategy_of(player)
        members = set(state.party_members(party))
        within = cut = _ZERO
        for ends, weight in graph.edges:
            if player not in ends:
                continue
            (other,) = ends - {player}
            if other in members:
                within += weight
            else:
                cut += weight
        return GraphDecomposition(None, None, within, cut)
    raise InvalidArgument(f"not a game state: {state!r}")


def closed_form_payoff(graph: WeightedGraph, state: State, player: int, scheme: Scheme) -> Fraction:
    """Textual closed form: within/2 + cut for fair-value and shapley,
    to_successors + cut for labor union.

    The labor-union form needs an ordered state.  Note the fair-value form is
    reported as stated even though it disagrees with the generic fair-value
    marginal; see :func:`cross_check`.
    """
    split = decompose(graph, state, player)
    if scheme is Scheme.LABOR_UNION:
        if split.to_successors is None:
            raise InvalidArgument("labor-union closed form needs an ordered state")
        return split.to_successors + split.cut
    return split.within_party / 2 + split.cut


@dataclass(frozen=True)
class CrossCheckEntry:
    player: int
    scheme: Scheme
    closed_form: Fraction
    generic: Fraction
    equal: bool


def _shared_game(graph: WeightedGraph, m: int, scheme: Scheme) -> GameSpec:
    v = coverage_valuation(graph)
    return GameSpec(n=graph.n, m=m, valuations=(v,) * m, scheme=scheme)


def cross_check(graph: WeightedGraph, state: State) -> tuple[CrossCheckEntry, ...]:
    """Closed form vs generic payoff, per affiliated player per scheme.

    Ordered states are checked under all three schemes (partition schemes see
    the underlying shape); partition states skip labor union.  Discrepancies
    are reported, not raised: the fair-value entries are expected to differ
    whenever the player has within-party edges.
    """
    if not graph.is_ordinary():
        raise Unsupported("cross checks are defined for ordinary graphs only")
    entries = []
    if isinstance(state, OrderedState):
        m = state.m
        shape = PartitionState(state.shape()) if not state.unaffiliated else None
        schemes: tuple[Scheme, ...] = (Scheme.FAIR_VALUE, Scheme.SHAPLEY, Scheme.LABOR_UNION)
    else:
        m = max(state.assignment)
        shape = state
        schemes = (Scheme.FAIR_VALUE, Scheme.SHAPLEY)
    for scheme in schemes:
        for player in range(1, graph.n + 1):
            if isinstance(state, OrderedState) and state.strategy_of(player) == 0:
                continue
            if scheme is Scheme.LABOR_UNION:
                generic = payoff(_shared_game(graph, m, scheme), state, player)
                closed = closed_form_payoff(graph, state, player, scheme)
            else:
                partition = shape
                if partition is None:
                    # Unaffiliated players exist: no faithful partition view.
                    continue
                generic = payoff(_shared_game(graph, m, scheme), partition, player)
                closed = closed_form_payoff(graph, partition, player, scheme)
            entries.append(CrossCheckEntry(player, scheme, closed, generic, closed == generic))
    return tuple(entries)


@dataclass(frozen=True)
class CutIdentityReport:
    total_profit: Fraction
    total_weight: Fraction
    cut_weight: Fraction
    identity_holds: bool


def cut_identity(graph: WeightedGraph, state: State) -> CutIdentityReport:
    """For two parties: total profit = total edge weight + weight of the cut.

    Hence the profit-maximising two-party split is exactly a maximum cut.
    """
    if not graph.is_ordinary():
        raise Unsupported("the cut identity is stated for ordinary graphs")
    if isinstance(state, OrderedState):
        if state.unaffiliated:
            raise InvalidArgument("cut identity needs every player affiliated")
        m = state.m
        shape = PartitionState(state.shape())
    else:
        shape = state
        m = max(2, max(state.assignment))
    if m != 2:
        raise InvalidArgument(f"cut identity needs exactly two parties, got m={m}")
    spec = _shared_game(graph, 2, Scheme.FAIR_VALUE)
    tp = total_profit(spec, shape)
    total = graph.total_weight()
    cut = _ZERO
    for ends, weight in graph.edges:
        a, b = tuple(ends)
        if shape.assignment[a - 1] != shape.assignment[b - 1]:
            cut += weight
    return CutIdentityReport(tp, total, cut, tp == total + cut)
