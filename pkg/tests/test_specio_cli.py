"""File format round-trips and the command-line surface."""

import json
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from profitgames import Scheme, format_rational, parse_rational
from profitgames.cli import run_command
from profitgames.errors import ParseError
from profitgames.specio import (
    parse_game_data,
    parse_game_file,
    serialize_game_spec,
    serialize_state,
)

SPECS = Path(__file__).resolve().parent.parent / "gamespecs"


def test_parse_bundled_gap_file():
    parsed = parse_game_file(SPECS / "shapley_gap_n3.json")
    assert parsed.spec.n == 3 and parsed.spec.m == 2
    assert parsed.spec.scheme is Scheme.SHAPLEY
    assert parsed.validated


def test_parse_rejects_more_parties_than_players():
    data = {
        "n": 2,
        "m": 3,
        "scheme": "fair_value",
        "valuations": {"shared": {"kind": "additive", "weights": ["1", "1"]}},
    }
    with pytest.raises(ParseError, match="m <= n"):
        parse_game_data(data)


def test_parse_rejects_partition_state_for_labor_union():
    data = {
        "n": 2,
        "m": 2,
        "scheme": "labor_union",
        "valuations": {"shared": {"kind": "additive", "weights": ["1", "1"]}},
        "initial_state": {"assignment": [1, 2]},
    }
    with pytest.raises(ParseError, match="arrival order"):
        parse_game_data(data)


def test_parse_rejects_unknown_keys():
    data = {
        "n": 2,
        "m": 2,
        "scheme": "shapley",
        "valuations": {"shared": {"kind": "additive", "weights": ["1", "1"]}},
        "comment": "nope",
    }
    with pytest.raises(ParseError, match="unknown keys"):
        parse_game_data(data)


def test_parse_rejects_invalid_valuation_with_witness():
    data = {
        "n": 2,
        "m": 1,
        "scheme": "fair_value",
        "valuations": [{"kind": "table", "n": 2, "values": ["0", "1", "1", "4"]}],
    }
    with pytest.raises(ParseError, match="not monotone submodular"):
        parse_game_data(data)
    parsed = parse_game_data(data, skip_validate=True)
    assert not parsed.validated


def test_round_trip_resolved_spec():
    for name in ("shapley_gap_n4.json", "lu_unaffiliated.json", "fair_value_anarchy.json"):
        parsed = parse_game_file(SPECS / name)
        data = serialize_game_spec(parsed.spec)
        again = parse_game_data(data)
        assert again.spec == parsed.spec
        assert serialize_game_spec(again.spec) == data
        assert list(data) == ["n", "m", "scheme", "valuations"]


def test_state_serialisation_round_trip():
    parsed = parse_game_file(SPECS / "lu_unaffiliated.json")
    state = parsed.initial_state
    assert serialize_state(state) == {"sequences": [[], []], "unaffiliated": [1, 2, 3, 4]}


def test_parse_rational_rejects_floats():
    with pytest.raises(ValueError):
        parse_rational(0.5)
    assert parse_rational("1.25") == Fraction(5, 4)
    assert parse_rational("-3/4") == Fraction(-3, 4)


@given(st.fractions())
def test_rational_round_trip(q):
    assert parse_rational(format_rational(q)) == q


# -- CLI ---------------------------------------------------------------------------


def test_cli_prices_reports_gap_ratios():
    code, report = run_command(["prices", str(SPECS / "shapley_gap_n3.json"), "--json"])
    assert code == 0
    assert report["poa"] == "3/2" and report["pos"] == "1"


def test_cli_dynamics_runs_to_equilibrium(tmp_path):
    out = tmp_path / "trace.jsonl"
    code, report = run_command(
        ["dynamics", str(SPECS / "lu_unaffiliated.json"), "--selector", "roundrobin", "--out", str(out)]
    )
    assert code == 0
    assert report["steps"] == 4 and report["nash_equilibrium"] is True
    assert len(out.read_text().splitlines()) == 4


def test_cli_trace_files_are_byte_stable(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    argv = ["dynamics", str(SPECS / "lu_unaffiliated.json"), "--seed", "5", "--selector", "random"]
    run_command(argv + ["--out", str(first)])
    run_command(argv + ["--out", str(second)])
    assert first.read_bytes() == second.read_bytes()
    header = first.read_text().splitlines()[0]
    assert header == "step,mover,from,to,payoff_before,payoff_after,potential_after,total_profit_after"


def test_cli_bounds_example():
    code, report = run_command(
        ["bounds", "--n", "10", "--beta", "2", "--alpha", "0", "--epsilon", "1/10", "--opt", "1"]
    )
    assert code == 0 and report["steps"] == 12


def test_cli_validate_flags_bad_table(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps(
            {
                "n": 2,
                "m": 1,
                "scheme": "fair_value",
                "valuations": [{"kind": "table", "n": 2, "values": ["0", "1", "1", "4"]}],
            }
        )
    )
    code, report = run_command(["validate", str(bad)])
    assert code == 2
    witness = report["valuations"][0]["witness"]
    assert witness["I"] == [] and witness["J"] == [1] and witness["i"] == 2


def test_cli_parse_error_exit_code(tmp_path):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    code, report = run_command(["prices", str(bad)])
    assert code == 1 and "error" in report
    missing = tmp_path / "missing.json"
    code, report = run_command(["prices", str(missing)])
    assert code == 1


def test_cli_equilibria_lists_states():
    code, report = run_command(
        ["equilibria", str(SPECS / "fair_value_anarchy.json"), "--strong", "--json"]
    )
    assert code == 0
    assert report["equilibrium_count"] == 2
    assert {tuple(s["assignment"]) for s in report["equilibria"]} == {(1, 2), (2, 1)}
    assert [tuple(s["assignment"]) for s in report["strong_equilibria"]] == [(2, 1)]


def test_cli_graph_check_triangle():
    code, report = run_command(["graph-check", str(SPECS / "triangle_cut.json")])
    assert code == 0
    assert report["closed_form_mismatches"] == 0
    assert report["cut_identity_failures"] == 0
    assert report["fair_value_closed_form_gaps"] > 0


def test_cli_reproduce_tight_family():
    code, report = run_command(["reproduce", "--case", "tight-family"])
    assert code == 0
    assert report["criteria"][0]["passed"] is True


def test_cli_never_mutates_inputs():
    path = SPECS / "shapley_gap_n3.json"
    before = path.read_bytes()
    run_command(["prices", str(path)])
    run_command(["validate", str(path)])
    assert path.read_bytes() == before
