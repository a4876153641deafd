"""Monotone submodular profit functions over a fixed ground set of players.

Players are numbered 1..n.  Coalitions are plain sets of player indices;
internally every valuation runs on n-bit masks with bit (i-1) set iff player
i is present, which is also the index convention of the explicit-table
representation and of the file format.  All values are exact
`fractions.Fraction` rationals, so downstream equality checks (equilibrium
indifference, exact potential identities) never depend on a floating-point
tolerance.

Four concrete families are provided:

- :class:`TableValuation` -- a full table of 2**n values;
- :class:`AdditiveValuation` -- per-player weights, summed;
- :class:`ConcaveCardinalityValuation` -- a concave profile of |S|;
- :class:`CoverageValuation` -- total weight of (hyper)edges touching S.

:func:`validate` checks monotonicity and submodularity exhaustively at desk
scale and returns concrete violation witnesses.  Irrational profiles (square
roots and the like) are deliberately not generated here; callers supply
rational approximations and validate them.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InvalidArgument, InvalidCoalition, ParseError, TooLarge
from .rationals import format_rational, parse_rational

_ZERO = Fraction(0)

# Full-table materialisation is the speed backbone of every exhaustive
# analysis; beyond this ground-set size tables are computed per call.
DENSE_LIMIT = 16

MONOTONE_EXHAUSTIVE_LIMIT = 16
SUBMODULAR_EXHAUSTIVE_LIMIT = 12


def coalition_mask(members: Iterable[int], n: int) -> int:
    """Bit mask of a coalition; rejects indices outside 1..n."""
    mask = 0
    for i in members:
        if not isinstance(i, int) or isinstance(i, bool) or not 1 <= i <= n:
            raise InvalidCoalition(f"player {i!r} outside ground set 1..{n}")
        mask |= 1 << (i - 1)
    return mask


def mask_members(mask: int) -> tuple[int, ...]:
    """Ascending player indices present in a bit mask."""
    members = []
    i = 1
    while mask:
        if mask & 1:
            members.append(i)
        mask >>= 1
        i += 1
    return tuple(members)


class Valuation:
    """Oracle for a non-decreasing submodular set function with v(empty)=0.

    Immutable after construction; instances cache derived tables internally
    and are safe to share across concurrent evaluations.
    """

    kind = "abstract"

    def __init__(self, n: int):
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise InvalidArgument(f"ground set size must be a positive int, got {n!r}")
        self.n = n

    # -- evaluation ---------------------------------------------------------

    def value(self, members: Iterable[int]) -> Fraction:
        """v(coalition).  v(empty) = 0 for every kind."""
        return self.value_of_mask(coalition_mask(members, self.n))

    def value_of_mask(self, mask: int) -> Fraction:
        if mask >> self.n:
            raise InvalidCoalition(f"mask {mask:#x} outside ground set 1..{self.n}")
        table = self._table()
        if table is not None:
            return table[mask]
        return self._value_of_mask(mask)

    def marginal(self, members: Iterable[int], player: int) -> Fraction:
        """v(coalition + player) - v(coalition); player must not be a member."""
        mask = coalition_mask(members, self.n)
        if not 1 <= player <= self.n:
            raise InvalidCoalition(f"player {player!r} outside ground set 1..{self.n}")
        bit = 1 << (player - 1)
        if mask & bit:
            raise InvalidArgument(f"player {player} already in the coalition")
        return self.value_of_mask(mask | bit) - self.value_of_mask(mask)

    def dense_table(self) -> list[Fraction]:
        """The full table indexed by coalition mask (materialised once)."""
        table = self._table()
        if table is None:
            raise TooLarge(f"dense table of 2**{self.n} entries exceeds the materialisation limit")
        return table

    def _table(self) -> list[Fraction] | None:
        table = getattr(self, "_dense", None)
        if table is None and self.n <= DENSE_LIMIT:
            table = [self._value_of_mask(mask) for mask in range(1 << self.n)]
            self._dense = table
        return table

    def _value_of_mask(self, mask: int) -> Fraction:
        raise NotImplementedError

    # -- identity and serialisation -----------------------------------------

    def _key(self):
        raise NotImplementedError

    def payload(self) -> dict:
        """JSON-ready fragment in the game-spec file format."""
        raise NotImplementedError

    def __eq__(self, other):
        return type(other) is type(self) and other._key() == self._key()

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n})"

    def __getstate__(self):
        # Caches are derived data; drop them so pickles stay small.
        return {k: v for k, v in self.__dict__.items() if not k.startswith("_")}


class TableValuation(Valuation):
    """Explicit table of 2**n rationals, indexed by coalition mask."""

    kind = "table"

    def __init__(self, values: Iterable[Fraction | int | str], n: int | None = None):
        entries = tuple(parse_rational(v) for v in values)
        if n is None:
            n = max(len(entries) - 1, 1).bit_length()
        super().__init__(n)
        if len(entries) != 1 << n:
            raise InvalidArgument(f"table needs {1 << n} entries for n={n}, got {len(entries)}")
        if entries[0] != 0:
            raise InvalidArgument("v(empty coalition) must be 0")
        for mask, v in enumerate(entries):
            if v < 0:
                raise InvalidArgument(f"negative value {v} at mask {mask}")
        self.values = entries

    def _value_of_mask(self, mask: int) -> Fraction:
        return self.values[mask]

    def _key(self):
        return (self.n, self.values)

    def payload(self) -> dict:
        return {"kind": "table", "n": self.n, "values": [format_rational(v) for v in self.values]}


class AdditiveValuation(Valuation):
    """v(S) = sum of per-player weights; weights must be non-negative."""

    kind = "additive"

    def __init__(self, weights: Iterable[Fraction | int | str]):
        ws = tuple(parse_rational(w) for w in weights)
        super().__init__(len(ws))
        for i, w in enumerate(ws, start=1):
            if w < 0:
                raise InvalidArgument(f"negative weight {w} for player {i}")
        self.weights = ws

    def _value_of_mask(self, mask: int) -> Fraction:
        total = _ZERO
        i = 0
        while mask:
            if mask & 1:
                total += self.weights[i]
            mask >>= 1
            i += 1
        return total

    def _key(self):
        return self.weights

    def payload(self) -> dict:
        return {"kind": "additive", "weights": [format_rational(w) for w in self.weights]}


class ConcaveCardinalityValuation(Valuation):
    """v(S) = c[|S|] for a concave non-decreasing profile with c[0] = 0."""

    kind = "concave_cardinality"

    def __init__(self, levels: Iterable[Fraction | int | str]):
        cs = tuple(parse_rational(c) for c in levels)
        if len(cs) < 2:
            raise InvalidArgument("profile needs entries c_0..c_n with n >= 1")
        super().__init__(len(cs) - 1)
        if cs[0] != 0:
            raise InvalidArgument("c_0 must be 0")
        for k in range(1, len(cs)):
            if cs[k] < cs[k - 1]:
                raise InvalidArgument(f"profile decreases at index {k}")
            if k >= 2 and cs[k] - cs[k - 1] > cs[k - 1] - cs[k - 2]:
                raise InvalidArgument(f"profile increment grows at index {k}")
        self.levels = cs

    def _value_of_mask(self, mask: int) -> Fraction:
        return self.levels[mask.bit_count()]

    def _key(self):
        return self.levels

    def payload(self) -> dict:
        return {"kind": "concave_cardinality", "levels": [format_rational(c) for c in self.levels]}


class CoverageValuation(Valuation):
    """v(S) = total weight of (hyper)edges with at least one endpoint in S."""

    kind = "coverage"

    def __init__(self, n: int, edges: Iterable[tuple[int, Fraction]]):
        super().__init__(n)
        seen: set[int] = set()
        checked = []
        for mask, weight in edges:
            if mask >> n or mask.bit_count() < 2:
                raise InvalidArgument(f"edge mask {mask:#x} needs >= 2 distinct endpoints within 1..{n}")
            if mask in seen:
                raise InvalidArgument(f"duplicate edge over players {mask_members(mask)}")
            w = parse_rational(weight)
            if w <= 0:
                raise InvalidArgument(f"edge weight must be positive, got {w}")
            seen.add(mask)
            checked.append((mask, w))
        self.edges = tuple(checked)

    def _value_of_mask(self, mask: int) -> Fraction:
        total = _ZERO
        for edge_mask, weight in self.edges:
            if edge_mask & mask:
                total += weight
        return total

    def _key(self):
        return (self.n, self.edges)

    def payload(self) -> dict:
        return {
            "kind": "coverage",
            "n": self.n,
            "edges": [
                {"v": list(mask_members(mask)), "w": format_rational(w)} for mask, w in self.edges
            ],
        }


# -- validation --------------------------------------------------------------


@dataclass(frozen=True)
class ValidationWitness:
    """A concrete counterexample to a required inequality (lhs >= rhs).

    For ``check == "monotone"``: lhs = v(larger), rhs = v(smaller).
    For ``check == "submodular"``: lhs = marginal of ``player`` on the smaller
    set, rhs = its marginal on the larger set.
    For ``check == "marginal_sum"``: smaller plays the role of the base set,
    larger the added set; lhs = sum of singleton marginals, rhs = the joint
    marginal.
    """

    check: str
    smaller: frozenset[int]
    larger: frozenset[int]
    player: int | None
    lhs: Fraction
    rhs: Fraction


@dataclass(frozen=True)
class ValidationReport:
    monotone: bool
    submodular: bool
    violations: tuple[ValidationWitness, ...]
    exhaustive: bool


def validate(
    valuation: Valuation,
    *,
    allow_sampled: bool = False,
    seed: int = 0,
    samples: int = 2000,
    marginal_sum_samples: int = 64,
) -> ValidationReport:
    """Check monotonicity and submodularity, exhaustively at desk scale.

    Monotonicity is exhaustive up to n=16 and submodularity up to n=12
    (the pairwise local check, which is equivalent to the nested-set
    definition).  Between those limits submodularity is sampled; beyond
    n=16 the whole check is sampled and requires ``allow_sampled=True``.
    On top of either mode, a seeded spot check of the diminishing-returns
    sum inequality over disjoint set pairs is always run and any violation
    is recorded alongside the rest.
    """
    n = valuation.n
    if n > MONOTONE_EXHAUSTIVE_LIMIT and not allow_sampled:
        raise TooLarge(f"exhaustive validation capped at n={MONOTONE_EXHAUSTIVE_LIMIT}; pass allow_sampled=True")

    rng = random.Random(seed)
    violations: list[ValidationWitness] = []
    monotone = True
    submodular = True
    exhaustive = True
    size = 1 << n if n <= DENSE_LIMIT else None
    table = valuation.dense_table() if size is not None else None

    def value(mask: int) -> Fraction:
        return table[mask] if table is not None else valuation.value_of_mask(mask)

    if n <= MONOTONE_EXHAUSTIVE_LIMIT:
        for mask in range(size):
            base = value(mask)
            for i in range(1, n + 1):
                bit = 1 << (i - 1)
                if mask & bit:
                    continue
                grown = value(mask | bit)
                if grown < base:
                    monotone = False
                    violations.append(
                        ValidationWitness(
                            "monotone",
                            frozenset(mask_members(mask)),
                            frozenset(mask_members(mask | bit)),
                            i,
                            grown,
                            base,
                        )
                    )
    else:
        exhaustive = False
        for _ in range(samples):
            mask = rng.randrange(1 << n)
            i = rng.randint(1, n)
            bit = 1 << (i - 1)
            mask &= ~bit
            if value(mask | bit) < value(mask):
                monotone = False
                violations.append(
                    ValidationWitness(
                        "monotone",
                        frozenset(mask_members(mask)),
                        frozenset(mask_members(mask | bit)),
                        i,
                        value(mask | bit),
                        value(mask),
                    )
                )

    # Pairwise local condition: v(M+a) + v(M+b) >= v(M+a+b) + v(M) for a,b
    # outside M.  Equivalent to diminishing marginals over nested sets, and
    # yields the witness (I=M, J=M+{a}, i=b) directly.
    if n <= SUBMODULAR_EXHAUSTIVE_LIMIT:
        for mask in range(size):
            base = value(mask)
            for a in range(1, n + 1):
                abit = 1 << (a - 1)
                if mask & abit:
                    continue
                with_a = value(mask | abit)
                for b in range(a + 1, n + 1):
                    bbit = 1 << (b - 1)
                    if mask & bbit:
                        continue
                    with_b = value(mask | bbit)
                    both = value(mask | abit | bbit)
                    if with_a + with_b < both + base:
                        submodular = False
                        violations.append(
                            ValidationWitness(
                                "submodular",
                                frozenset(mask_members(mask)),
                                frozenset(mask_members(mask | abit)),
                                b,
                                with_b - base,
                                both - with_a,
                            )
                        )
    else:
        exhaustive = False
        for _ in range(samples):
            mask = rng.randrange(1 << n)
            a, b = rng.sample(range(1, n + 1), 2)
            a, b = min(a, b), max(a, b)
            abit, bbit = 1 << (a - 1), 1 << (b - 1)
            mask &= ~(abit | bbit)
            base = value(mask)
            with_a = value(mask | abit)
            with_b = value(mask | bbit)
            both = value(mask | abit | bbit)
            if with_a + with_b < both + base:
                submodular = False
                violations.append(
                    ValidationWitness(
                        "submodular",
                        frozenset(mask_members(mask)),
                        frozenset(mask_members(mask | abit)),
                        b,
                        with_b - base,
                        both - with_a,
                    )
                )

    # Seeded spot check of the summed-marginals inequality on disjoint pairs.
    for _ in range(marginal_sum_samples):
        base_mask = 0
        added_mask = 0
        for i in range(n):
            r = rng.random()
            if r < 1 / 3:
                base_mask |= 1 << i
            elif r < 2 / 3:
                added_mask |= 1 << i
        if not added_mask:
            continue
        base = value(base_mask)
        single_sum = sum(
            (value(base_mask | (1 << (i - 1))) - base for i in mask_members(added_mask)),
            _ZERO,
        )
        joint = value(base_mask | added_mask) - base
        if single_sum < joint:
            submodular = False
            violations.append(
                ValidationWitness(
                    "marginal_sum",
                    frozenset(mask_members(base_mask)),
                    frozenset(mask_members(added_mask)),
                    None,
                    single_sum,
                    joint,
                )
            )

    return ValidationReport(monotone, submodular, tuple(violations), exhaustive)


# -- construction from file fragments ----------------------------------------

_KINDS = {
    "table": {"kind", "n", "values"},
    "additive": {"kind", "weights"},
    "concave_cardinality": {"kind", "levels"},
    "coverage": {"kind", "n", "edges"},
}


def build(fragment: Mapping, *, n: int | None = None, location: str = "valuation") -> Valuation:
    """Construct a valuation from a game-spec file fragment.

    ``n`` cross-checks the fragment against the game's ground set when given.
    Raises :class:`ParseError` with a location pointer on any malformation.
    """
    if not isinstance(fragment, Mapping):
        raise ParseError("valuation fragment must be an object", location)
    kind = fragment.get("kind")
    if kind not in _KINDS:
        raise ParseError(f"unknown valuation kind {kind!r}", f"{location}.kind")
    unknown = set(fragment) - _KINDS[kind]
    if unknown:
        raise ParseError(f"unknown keys {sorted(unknown)}", location)

    try:
        if kind == "table":
            values = _require_list(fragment, "values", location)
            table_n = fragment.get("n")
            built: Valuation = TableValuation(values, n=table_n)
        elif kind == "additive":
            built = AdditiveValuation(_require_list(fragment, "weights", location))
        elif kind == "concave_cardinality":
            built = ConcaveCardinalityValuation(_require_list(fragment, "levels", location))
        else:
            edges = _require_list(fragment, "edges", location)
            cover_n = fragment.get("n", n)
            if cover_n is None:
                raise ParseError("coverage fragment needs 'n'", f"{location}.n")
            built = CoverageValuation(cover_n, _parse_edges(edges, cover_n, f"{location}.edges"))
    except (InvalidArgument, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), location) from exc

    if n is not None and built.n != n:
        raise ParseError(f"valuation over {built.n} players in a game with n={n}", location)
    return built


def _require_list(fragment: Mapping, key: str, location: str) -> list:
    value = fragment.get(key)
    if not isinstance(value, list) or not value:
        raise ParseError(f"'{key}' must be a non-empty array", f"{location}.{key}")
    return value


def _parse_edges(edges: list, n: int, location: str) -> list[tuple[int, Fraction]]:
    parsed = []
    for idx, edge in enumerate(edges):
        loc = f"{location}[{idx}]"
        if not isinstance(edge, Mapping) or set(edge) - {"v", "w"}:
            raise ParseError("edge must be an object with keys 'v' and 'w'", loc)
        ends = edge.get("v")
        if not isinstance(ends, list) or len(ends) < 2 or len(set(ends)) != len(ends):
            raise ParseError("'v' must list >= 2 distinct endpoints", f"{loc}.v")
        try:
            mask = coalition_mask(ends, n)
            weight = parse_rational(edge.get("w"))
        except (InvalidCoalition, ValueError) as exc:
            raise ParseError(str(exc), loc) from exc
        parsed.append((mask, weight))
    return parsed
