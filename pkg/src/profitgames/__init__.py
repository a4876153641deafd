"""Profit-sharing coalition games with exact rational arithmetic.

Build games from monotone submodular party valuations, pay players by one of
three marginal-utility schemes (fair value, labor union, shapley), run
improvement dynamics, and verify equilibrium, potential, niceness and
price-of-anarchy properties by exhaustive desk-scale computation.
"""

from .analysis import (
    EquilibriumReport,
    NicenessReport,
    OptimalStructure,
    StateClassification,
    classify_state,
    enumerate_states,
    equilibrium_shapes,
    optimum,
    prices,
    state_count,
    strong_deviation,
    verify_niceness,
)
from .dynamics import (
    ConvergenceBound,
    DynamicsConfig,
    ImprovementProfile,
    Trace,
    TraceStep,
    best_response,
    ceil_log_ratio,
    ceil_scaled_log,
    contraction_bound,
    convergence_bounds,
    improvement_profile,
    run,
    step,
    trace_csv,
    trace_jsonl,
)
from .errors import (
    InvalidArgument,
    InvalidCoalition,
    NoEquilibriumFound,
    NoOpMove,
    ParseError,
    ProfitGameError,
    SchemeMismatch,
    TooLarge,
    Unsupported,
)
from .games import (
    GameSpec,
    OrderedState,
    PartitionState,
    Scheme,
    all_payoffs,
    apply_move,
    payoff,
    potential,
    total_profit,
)
from .graphgames import (
    CrossCheckEntry,
    CutIdentityReport,
    GraphDecomposition,
    WeightedGraph,
    closed_form_payoff,
    coverage_valuation,
    cross_check,
    cut_identity,
    decompose,
)
from .rationals import format_rational, parse_rational
from .valuations import (
    AdditiveValuation,
    ConcaveCardinalityValuation,
    CoverageValuation,
    TableValuation,
    ValidationReport,
    ValidationWitness,
    Valuation,
    build,
    validate,
)

__version__ = "0.1.0"
