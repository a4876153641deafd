"""Command-line front end: file ingestion, experiments, and reproduction.

Subcommands map onto the library: ``validate`` runs the submodularity
checkers, ``dynamics`` runs and exports improvement traces, ``equilibria``
and ``prices`` do the exhaustive equilibrium analyses, ``bounds`` evaluates
the convergence-step formulas, ``graph-check`` verifies the coverage-game
closed forms, and ``reproduce`` re-runs the bundled verification suites.

Exit codes: 0 success, 1 usage or parse errors, 2 a verification failure
(an invalid valuation, a violated identity, a failed reproduction case).
Output is plain text, or a single JSON report with ``--json``; no input
file is ever modified.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import analysis, claims, dynamics, games, graphgames, specio
from .errors import ParseError, ProfitGameError
from .rationals import format_rational, parse_rational

_USAGE_ERROR = 1
_VERIFICATION_FAILURE = 2


def _rational_arg(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="profitgames",
        description="Profit-sharing coalition games: dynamics and exhaustive analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_spec_command(name, help_text, alpha_default="none"):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("spec", help="game-spec JSON file")
        p.add_argument("--skip-validate", action="store_true", help="skip valuation validation")
        p.add_argument("--json", action="store_true", help="emit one JSON report on stdout")
        if alpha_default != "none":
            p.add_argument("--alpha", type=_rational_arg, default=alpha_default)
        return p

    add_spec_command("validate", "check every valuation monotone submodular")

    # For `dynamics` a missing --alpha defers to the file's dynamics block.
    p = add_spec_command("dynamics", "run an improvement dynamic and export the trace", alpha_default=None)
    p.add_argument("--selector", choices=dynamics.SELECTORS, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--out", help="trace file; format from extension (.jsonl or .csv)")

    p = add_spec_command("equilibria", "list all (alpha-)equilibrium states", alpha_default=Fraction(0))
    p.add_argument("--strong", action="store_true", help="also classify strong equilibria")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--budget", type=int, default=analysis.DEFAULT_STATE_BUDGET)

    p = add_spec_command("prices", "price of anarchy and stability by enumeration", alpha_default=Fraction(0))
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--budget", type=int, default=analysis.DEFAULT_STATE_BUDGET)

    p = sub.add_parser("bounds", help="convergence-step bounds for nice potential games")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--beta", type=_rational_arg, required=True)
    p.add_argument("--alpha", type=_rational_arg, default=Fraction(0))
    p.add_argument("--epsilon", type=_rational_arg, required=True)
    p.add_argument("--opt", type=_rational_arg, required=True)
    p.add_argument("--json", action="store_true")

    p = add_spec_command("graph-check", "verify coverage-game closed forms")
    p.add_argument("--budget", type=int, default=analysis.DEFAULT_STATE_BUDGET)

    p = sub.add_parser("reproduce", help="re-run the bundled verification suites")
    p.add_argument(
        "--case",
        choices=sorted(claims.REPRODUCE_CASES),
        default="all",
    )
    p.add_argument("--json", action="store_true")
    return parser


def run_command(argv) -> tuple[int, dict]:
    """Execute one CLI invocation; returns (exit code, run report)."""
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return (0 if exc.code in (0, None) else _USAGE_ERROR), {"command": list(argv)}
    started = time.monotonic()
    report: dict = {"command": ["profitgames", *map(str, argv)]}
    try:
        code = _dispatch(args, report)
    except ParseError as exc:
        report["error"] = str(exc)
        code = _USAGE_ERROR
    except (OSError, ProfitGameError) as exc:
        report["error"] = f"{type(exc).__name__}: {exc}"
        code = _USAGE_ERROR
    report["duration_seconds"] = round(time.monotonic() - started, 6)
    report["exit_code"] = code
    return code, report


def _load(args, report) -> specio.ParsedGame:
    parsed = specio.parse_game_file(args.spec, skip_validate=args.skip_validate)
    report["spec"] = specio.serialize_game_spec(parsed.spec)
    if not parsed.validated:
        report["banner"] = "valuation-unverified"
    return parsed


def _dispatch(args, report) -> int:
    if args.command == "validate":
        return _cmd_validate(args, report)
    if args.command == "dynamics":
        return _cmd_dynamics(args, report)
    if args.command in ("equilibria", "prices"):
        return _cmd_prices(args, report)
    if args.command == "bounds":
        return _cmd_bounds(args, report)
    if args.command == "graph-check":
        return _cmd_graph_check(args, report)
    if args.command == "reproduce":
        return _cmd_reproduce(args, report)
    raise AssertionError(f"unhandled command {args.command}")


def _cmd_validate(args, report) -> int:
    from .valuations import validate

    parsed = specio.parse_game_file(args.spec, skip_validate=True)
    report["spec"] = specio.serialize_game_spec(parsed.spec)
    results = []
    all_ok = True
    for j, valuation in enumerate(parsed.spec.valuations, start=1):
        vreport = validate(valuation)
        ok = vreport.monotone and vreport.submodular
        all_ok = all_ok and ok
        entry = {
            "party": j,
            "kind": valuation.kind,
            "monotone": vreport.monotone,
            "submodular": vreport.submodular,
            "exhaustive": vreport.exhaustive,
        }
        if vreport.violations:
            w = vreport.violations[0]
            entry["witness"] = {
                "check": w.check,
                "I": sorted(w.smaller),
                "J": sorted(w.larger),
                "i": w.player,
                "lhs": format_rational(w.lhs),
                "rhs": format_rational(w.rhs),
            }
        results.append(entry)
    report["valuations"] = results
    return 0 if all_ok else _VERIFICATION_FAILURE


def _default_initial_state(spec: games.GameSpec):
    if spec.scheme is games.Scheme.LABOR_UNION:
        return games.OrderedState(
            tuple(() for _ in range(spec.m)), frozenset(range(1, spec.n + 1))
        )
    return games.PartitionState((1,) * spec.n)


def _cmd_dynamics(args, report) -> int:
    parsed = _load(args, report)
    config = parsed.dynamics or dynamics.DynamicsConfig()
    overrides = {}
    if args.alpha is not None:
        overrides["alpha"] = args.alpha
    if args.selector is not None:
        overrides["selector"] = args.selector
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.max_steps is not None:
        overrides["max_steps"] = args.max_steps
    if overrides:
        config = dynamics.DynamicsConfig(
            alpha=overrides.get("alpha", config.alpha),
            selector=overrides.get("selector", config.selector),
            seed=overrides.get("seed", config.seed),
            max_steps=overrides.get("max_steps", config.max_steps),
        )
    initial = parsed.initial_state or _default_initial_state(parsed.spec)
    trace = dynamics.run(parsed.spec, initial, config)
    final_class = analysis.classify_state(parsed.spec, trace.final_state, config.alpha)
    report["config"] = {
        "alpha": format_rational(config.alpha),
        "selector": config.selector,
        "seed": config.seed,
        "max_steps": config.max_steps,
    }
    report["initial_state"] = specio.serialize_state(initial)
    report["steps"] = len(trace.steps)
    report["converged"] = trace.converged
    report["truncated"] = trace.truncated
    report["final_state"] = specio.serialize_state(trace.final_state)
    report["final_total_profit"] = format_rational(
        trace.steps[-1].total_profit_after if trace.steps else trace.initial_total_profit
    )
    report["trace"] = dynamics.trace_rows(trace)
    if args.out:
        write_trace(trace, Path(args.out).suffix.lstrip(".") or "jsonl", args.out)
        report["outputs"] = {"trace": args.out}
    report["alpha_nash_equilibrium"] = final_class.is_alpha_nash
    report["nash_equilibrium"] = final_class.is_nash
    return 0


def write_trace(trace: dynamics.Trace, fmt: str, path) -> None:
    """Bit-stable trace export: LF newlines, UTF-8, rationals as p/q."""
    if fmt == "jsonl":
        text = dynamics.trace_jsonl(trace)
    elif fmt == "csv":
        text = dynamics.trace_csv(trace)
    else:
        raise ParseError(f"unknown trace format {fmt!r} (use jsonl or csv)")
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _cmd_prices(args, report) -> int:
    parsed = _load(args, report)
    want_strong = args.command == "equilibria" and args.strong
    result = analysis.prices(
        parsed.spec,
        args.alpha,
        include_strong=want_strong,
        budget=args.budget,
        threads=args.threads,
    )
    report["alpha"] = format_rational(args.alpha)
    report["optimum"] = {
        "state": specio.serialize_state(result.optimum.state),
        "value": format_rational(result.optimum.value),
    }
    report["equilibrium_count"] = len(result.equilibria)
    report["worst_value"] = format_rational(result.worst_value)
    report["best_value"] = format_rational(result.best_value)
    report["poa"] = format_rational(result.poa)
    report["pos"] = format_rational(result.pos)
    if args.command == "equilibria":
        report["equilibria"] = [specio.serialize_state(s) for s in result.equilibria]
        if want_strong:
            report["strong_equilibria"] = [
                specio.serialize_state(s) for s in result.strong_equilibria
            ]
    return 0


def _cmd_bounds(args, report) -> int:
    bounds = dynamics.convergence_bounds(args.n, args.beta, args.alpha, args.epsilon, args.opt)
    nash = bounds["nash"]
    report["steps"] = nash.steps
    for key, bound in bounds.items():
        report[key] = {
            "a": format_rational(bound.a),
            "b": format_rational(bound.b),
            "epsilon": format_rational(bound.epsilon),
            "steps": bound.steps,
            "guaranteed_value": format_rational(bound.guaranteed_value),
        }
    return 0


def _cmd_graph_check(args, report) -> int:
    parsed = _load(args, report)
    raw = json.loads(Path(args.spec).read_text(encoding="utf-8"))
    graph = specio.graph_of(raw, parsed.spec.n)
    spec = parsed.spec
    mismatches = 0
    fair_value_gaps = 0
    cut_failures = 0
    states_checked = 0
    fv = graphgames._shared_game(graph, spec.m, games.Scheme.FAIR_VALUE)
    sh = graphgames._shared_game(graph, spec.m, games.Scheme.SHAPLEY)
    lu = graphgames._shared_game(graph, spec.m, games.Scheme.LABOR_UNION)
    for state in analysis.enumerate_states(fv, budget=args.budget):
        states_checked += 1
        if spec.m == 2 and not graphgames.cut_identity(graph, state).identity_holds:
            cut_failures += 1
        for player in range(1, spec.n + 1):
            split = graphgames.decompose(graph, state, player)
            if graphgames.closed_form_payoff(graph, state, player, games.Scheme.SHAPLEY) != games.payoff(sh, state, player):
                mismatches += 1
            if games.payoff(fv, state, player) != split.cut:
                mismatches += 1
            if graphgames.closed_form_payoff(graph, state, player, games.Scheme.FAIR_VALUE) != games.payoff(fv, state, player):
                fair_value_gaps += 1
    for state in analysis.enumerate_states(lu, expand_orderings=True, budget=args.budget):
        for player in range(1, spec.n + 1):
            if state.strategy_of(player) == 0:
                continue
            if graphgames.closed_form_payoff(graph, state, player, games.Scheme.LABOR_UNION) != games.payoff(lu, state, player):
                mismatches += 1
    report["states_checked"] = states_checked
    report["closed_form_mismatches"] = mismatches
    report["cut_identity_failures"] = cut_failures
    report["fair_value_closed_form_gaps"] = fair_value_gaps
    report["note"] = (
        "fair_value_closed_form_gaps counts the documented disagreement between the "
        "within/2+cut closed form and the generic fair-value marginal (equal to the cut)"
    )
    return 0 if mismatches == 0 and cut_failures == 0 else _VERIFICATION_FAILURE


def _cmd_reproduce(args, report) -> int:
    numbers = claims.REPRODUCE_CASES[args.case]
    results = claims.run_criteria(numbers)
    report["case"] = args.case
    report["criteria"] = [
        {
            "number": r.number,
            "key": r.key,
            "passed": r.passed,
            "summary": r.summary,
            "details": r.details,
        }
        for r in results
    ]
    report["lines"] = [r.line() for r in results]
    return 0 if all(r.passed for r in results) else _VERIFICATION_FAILURE


def _print_text(report: dict) -> None:
    for line in report.get("lines", ()):
        print(line)
    # The equilibrium flags close the report so the verdict is the last line.
    deferred = [k for k in ("alpha_nash_equilibrium", "nash_equilibrium") if k in report]
    for key, value in report.items():
        if key in ("lines", "criteria", "trace", "equilibria", "strong_equilibria", *deferred):
            continue
        if isinstance(value, (dict, list)):
            print(f"{key}: {json.dumps(value, separators=(', ', ': '))}")
        else:
            print(f"{key}: {value}")
    for key in deferred:
        print(f"{key}: {json.dumps(report[key])}")


def main(argv=None) -> int:
    code, report = run_command(sys.argv[1:] if argv is None else argv)
    if report.get("command") and "--json" in report["command"]:
        print(json.dumps(report, indent=2))
    else:
        _print_text(report)
    return code


if __name__ == "__main__":
    raise SystemExit(main())
