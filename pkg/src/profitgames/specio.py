"""The game-spec JSON format: parsing, validation, canonical serialisation.

A game file looks like::

    {
      "n": 3, "m": 2, "scheme": "shapley",
      "valuations": [fragment, fragment],
      "initial_state": {"assignment": [1, 2, 2]},
      "dynamics": {"alpha": "1/4", "selector": "basic", "seed": 7, "max_steps": 100}
    }

``valuations`` may instead be ``{"shared": fragment}`` (one valuation for all
parties) or ``{"graph": {"edges": [{"v": [1,2], "w": "1"}, ...]}}`` (the edge
coverage valuation shared by all parties).  Labor-union initial states are
ordered: ``{"sequences": [[3,1],[2]], "unaffiliated": [4]}``.  All numbers
that mean payoffs are exact-rational strings; unknown keys are rejected
everywhere.  Parsing a serialised resolved spec returns an equal spec.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .dynamics import SELECTORS, DynamicsConfig
from .errors import InvalidArgument, ParseError
from .games import GameSpec, OrderedState, PartitionState, Scheme, State, check_state
from .graphgames import WeightedGraph
from .rationals import parse_rational
from .valuations import build as build_valuation
from .valuations import validate

_SCHEME_TAGS = {scheme.value: scheme for scheme in Scheme}
_TOP_KEYS = {"n", "m", "scheme", "valuations", "initial_state", "dynamics"}
_DYNAMICS_KEYS = {"alpha", "selector", "seed", "max_steps"}


@dataclass(frozen=True)
class ParsedGame:
    spec: GameSpec
    initial_state: State | None
    dynamics: DynamicsConfig | None
    validated: bool


def parse_game_file(path: str | Path, *, skip_validate: bool = False) -> ParsedGame:
    """Read and fully validate a game-spec file.

    Every valuation is checked monotone submodular unless ``skip_validate``
    is set (reports downstream then carry a "valuation-unverified" banner).
    """
    raw = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"{path}:{exc.lineno}:{exc.colno}") from None
    return parse_game_data(data, skip_validate=skip_validate)


def parse_game_data(data, *, skip_validate: bool = False) -> ParsedGame:
    if not isinstance(data, Mapping):
        raise ParseError("game spec must be a JSON object", "game")
    unknown = set(data) - _TOP_KEYS
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}", "game")

    n = _require_int(data, "n")
    m = _require_int(data, "m")
    scheme_tag = data.get("scheme")
    if scheme_tag not in _SCHEME_TAGS:
        raise ParseError(
            f"scheme must be one of {sorted(_SCHEME_TAGS)}, got {scheme_tag!r}", "game.scheme"
        )
    scheme = _SCHEME_TAGS[scheme_tag]
    if m > n:
        raise ParseError(f"m={m} exceeds n={n}; m <= n is required", "game.m")

    valuations = _parse_valuations(data.get("valuations"), n, m)
    try:
        spec = GameSpec(n=n, m=m, valuations=valuations, scheme=scheme)
    except InvalidArgument as exc:
        raise ParseError(str(exc), "game") from exc

    validated = not skip_validate
    if not skip_validate:
        seen_ids: set[int] = set()
        for j, v in enumerate(valuations):
            if id(v) in seen_ids:
                continue
            seen_ids.add(id(v))
            report = validate(v)
            if not (report.monotone and report.submodular):
                witness = report.violations[0]
                raise ParseError(
                    f"valuation is not monotone submodular: {witness.check} violation with "
                    f"I={sorted(witness.smaller)}, J={sorted(witness.larger)}, i={witness.player}, "
                    f"lhs={witness.lhs}, rhs={witness.rhs}",
                    f"game.valuations[{j}]",
                )

    initial_state = None
    if "initial_state" in data:
        initial_state = parse_state(data["initial_state"], spec, "game.initial_state")
    dynamics = None
    if "dynamics" in data:
        dynamics = _parse_dynamics(data["dynamics"], "game.dynamics")
    return ParsedGame(spec, initial_state, dynamics, validated)


def _require_int(data: Mapping, key: str) -> int:
    value = data.get(key)
    if not isinstance(value, int) or isinstance(value, bool) or value < 1:
        raise ParseError(f"'{key}' must be a positive integer, got {value!r}", f"game.{key}")
    return value


def _parse_valuations(raw, n: int, m: int):
    if isinstance(raw, list):
        if len(raw) != m:
            raise ParseError(f"expected {m} valuations, got {len(raw)}", "game.valuations")
        return tuple(
            build_valuation(frag, n=n, location=f"game.valuations[{j}]")
            for j, frag in enumerate(raw)
        )
    if isinstance(raw, Mapping) and set(raw) == {"shared"}:
        shared = build_valuation(raw["shared"], n=n, location="game.valuations.shared")
        return (shared,) * m
    if isinstance(raw, Mapping) and set(raw) == {"graph"}:
        graph_frag = raw["graph"]
        if not isinstance(graph_frag, Mapping) or set(graph_frag) - {"edges"}:
            raise ParseError("graph fragment must be {'edges': [...]}", "game.valuations.graph")
        fragment = {"kind": "coverage", "n": n, "edges": graph_frag.get("edges")}
        shared = build_valuation(fragment, n=n, location="game.valuations.graph")
        return (shared,) * m
    raise ParseError(
        "valuations must be a list of fragments, {'shared': fragment} or {'graph': ...}",
        "game.valuations",
    )


def graph_of(data: Mapping, n: int) -> WeightedGraph:
    """The graph behind a ``{"graph": ...}`` valuations block."""
    frag = data.get("valuations")
    if not isinstance(frag, Mapping) or "graph" not in frag:
        raise ParseError("this spec does not use graph-based valuations", "game.valuations")
    edges = frag["graph"].get("edges")
    parsed = []
    for idx, edge in enumerate(edges):
        parsed.append((tuple(edge["v"]), parse_rational(edge["w"])))
    return WeightedGraph.from_edges(n, parsed)


def parse_state(raw, spec: GameSpec, location: str) -> State:
    if not isinstance(raw, Mapping):
        raise ParseError("state must be an object", location)
    if spec.scheme is Scheme.LABOR_UNION:
        if set(raw) != {"sequences", "unaffiliated"}:
            raise ParseError(
                "labor-union games track arrival order: the state needs exactly "
                "'sequences' (one array per party) and 'unaffiliated'",
                location,
            )
        sequences = raw["sequences"]
        if not isinstance(sequences, list) or len(sequences) != spec.m:
            raise ParseError(f"'sequences' must list {spec.m} arrays", f"{location}.sequences")
        try:
            state: State = OrderedState(
                tuple(tuple(seq) for seq in sequences), frozenset(raw["unaffiliated"])
            )
            check_state(spec, state)
        except (InvalidArgument, TypeError) as exc:
            raise ParseError(str(exc), location) from exc
        return state
    if set(raw) != {"assignment"}:
        raise ParseError("partition state needs exactly the key 'assignment'", location)
    assignment = raw["assignment"]
    if not isinstance(assignment, list):
        raise ParseError("'assignment' must be an array", f"{location}.assignment")
    try:
        state = PartitionState(tuple(assignment))
        check_state(spec, state)
    except (InvalidArgument, TypeError) as exc:
        raise ParseError(str(exc), location) from exc
    return state


def _parse_dynamics(raw, location: str) -> DynamicsConfig:
    if not isinstance(raw, Mapping):
        raise ParseError("dynamics must be an object", location)
    unknown = set(raw) - _DYNAMICS_KEYS
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}", location)
    try:
        alpha = parse_rational(raw.get("alpha", 0))
    except ValueError as exc:
        raise ParseError(str(exc), f"{location}.alpha") from exc
    selector = raw.get("selector", "basic")
    if selector not in SELECTORS:
        raise ParseError(f"selector must be one of {SELECTORS}", f"{location}.selector")
    seed = raw.get("seed", 0)
    max_steps = raw.get("max_steps", 10_000)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ParseError("'seed' must be an integer", f"{location}.seed")
    if not isinstance(max_steps, int) or isinstance(max_steps, bool) or max_steps < 1:
        raise ParseError("'max_steps' must be a positive integer", f"{location}.max_steps")
    try:
        return DynamicsConfig(alpha=alpha, selector=selector, seed=seed, max_steps=max_steps)
    except InvalidArgument as exc:
        raise ParseError(str(exc), location) from exc


# -- canonical serialisation ----------------------------------------------------


def serialize_game_spec(spec: GameSpec) -> dict:
    """Resolved spec in canonical key order; parse(serialize(s)) == s."""
    return {
        "n": spec.n,
        "m": spec.m,
        "scheme": spec.scheme.value,
        "valuations": [v.payload() for v in spec.valuations],
    }


def serialize_state(state: State) -> dict:
    if isinstance(state, PartitionState):
        return {"assignment": list(state.assignment)}
    return {
        "sequences": [list(seq) for seq in state.sequences],
        "unaffiliated": sorted(state.unaffiliated),
    }
