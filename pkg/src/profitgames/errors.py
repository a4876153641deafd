"""Exception types shared across the library."""


class ProfitGameError(Exception):
    """Base class for all library-specific errors."""


class InvalidCoalition(ProfitGameError, ValueError):
    """A coalition mentions player indices outside the ground set."""


class InvalidArgument(ProfitGameError, ValueError):
    """An argument violates an operation's precondition."""


class ParseError(ProfitGameError, ValueError):
    """Malformed game-spec input; ``location`` points at the offending field."""

    def __init__(self, message: str, location: "str | None" = None):
        self.location = location
        super().__init__(message if location is None else f"{location}: {message}")


class TooLarge(ProfitGameError):
    """An exhaustive computation would exceed its configured budget."""


class SchemeMismatch(ProfitGameError, TypeError):
    """State representation does not match the game's payoff scheme."""


class NoOpMove(ProfitGameError, ValueError):
    """A move targets the player's current strategy."""


class Unsupported(ProfitGameError, ValueError):
    """Operation undefined for this input (e.g. hyperedges in edge splits)."""


class NoEquilibriumFound(ProfitGameError, RuntimeError):
    """Enumeration found no equilibrium.

    Every game built here is a potential game and has a pure equilibrium, so
    hitting this error signals an implementation bug, not a property of the
    instance.
    """
