"""Command line entry points.

Exit codes: 0 success, 1 domain error (machine-readable error code on
stderr), 2 usage error.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .engine import CorruptLog, EngineError, replay as replay_log, scoreboard, state_hash
from .lang.errors import CheckError, ParseError, SourceTooLarge, TypeCheckFailed
from .lang.parser import parse_unit
from .lang.typecheck import check_unit
from .mutation import OPERATORS, ValidationError, enumerate_mutants
from .testing import (Assertion, DomainTooLarge, TestCase, TestRejection,
                      bounded_equivalence_oracle, build_kill_matrix,
                      validate_test)


def _fail(code: str, message: str) -> None:
    click.echo(f"{code}: {message}", err=True)
    sys.exit(1)


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except FileNotFoundError:
        _fail("file_not_found", path)
    except OSError as e:
        _fail("io_error", str(e))


def _load_unit(path: str):
    try:
        return check_unit(parse_unit(_read_text(path), Path(path).stem))
    except (ParseError, SourceTooLarge) as e:
        _fail("syntax_error", str(e))
    except TypeCheckFailed as e:
        _fail("type_error", str(e))


@click.group()
def main():
    """Mutation-testing duel platform tooling."""


@main.command()
@click.option("--port", type=int, envvar="ARENA_PORT", default=8080,
              show_default=True)
@click.option("--data-dir", envvar="ARENA_DATA_DIR", default="./data",
              show_default=True)
@click.option("--analytics-url", envvar="ARENA_ANALYTICS_URL", default=None)
@click.option("--analytics-disabled", is_flag=True, default=False)
def serve(port, data_dir, analytics_url, analytics_disabled):
    """Run the HTTP game server."""
    from .server import serve as run_server
    run_server(port, data_dir, analytics_url, analytics_disabled)


@main.command()
@click.argument("unit_file")
@click.option("--ops", default=",".join(OPERATORS),
              help="Comma-separated operator names.", show_default=True)
def mutate(unit_file, ops):
    """Enumerate mutants of a unit, one line per candidate."""
    unit = _load_unit(unit_file)
    names = tuple(s.strip() for s in ops.split(",") if s.strip())
    known = set(OPERATORS)
    for name in names:
        if name not in known:
            _fail("unknown_operator", name)
    for c in enumerate_mutants(unit, names):
        click.echo(f"{c.operator} {c.line}:{c.col} "
                   f"{c.original_fragment} -> {c.mutated_fragment}")


def _load_tests(path: str) -> list[TestCase]:
    doc = json.loads(_read_text(path))
    if isinstance(doc, dict):
        doc = doc.get("tests", [])
    if doc and isinstance(doc[0], dict):
        doc = [doc]  # a single test given as a bare assertion list
    return [TestCase([Assertion.from_record(a) for a in records])
            for records in doc]


@main.command()
@click.argument("unit_file")
@click.argument("tests_file")
@click.option("--mutant", "mutant_files", multiple=True,
              help="Mutant source file; repeatable. Enables the kill matrix.")
def test(unit_file, tests_file, mutant_files):
    """Validate tests against a unit, optionally scoring given mutants."""
    unit = _load_unit(unit_file)
    try:
        tests = _load_tests(tests_file)
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        _fail("bad_test_file", str(e))
    valid: dict[str, TestCase] = {}
    failed = False
    for i, case in enumerate(tests):
        tid = f"t{i + 1}"
        try:
            result = validate_test(unit, case)
        except TestRejection as e:
            click.echo(f"{tid} REJECTED {e.code}: {e}")
            failed = True
            continue
        click.echo(f"{tid} OK covered={sorted(result.covered_lines)}")
        valid[tid] = case
    mutants = {}
    for i, path in enumerate(mutant_files):
        mutants[f"m{i + 1}"] = _load_unit(path)
    if mutants:
        matrix = build_kill_matrix(unit, mutants, valid)
        for (tid, mid), verdict in sorted(matrix.entries.items()):
            click.echo(f"{tid} x {mid}: {verdict}")
        click.echo(f"mutation score: {matrix.mutation_score:.4f}")
    if failed:
        _fail("test_rejected", "one or more tests were rejected")


@main.command()
@click.argument("unit_file")
@click.argument("mutant_file")
@click.option("--fn", default=None, help="Function to adjudicate "
              "(defaults to the unit's only function).")
def equivalence(unit_file, mutant_file, fn):
    """Adjudicate mutant equivalence over the bounded default domain."""
    unit = _load_unit(unit_file)
    mutant = _load_unit(mutant_file)
    if fn is None:
        if len(unit.functions) != 1:
            _fail("ambiguous_function", "use --fn to pick a function")
        fn = unit.functions[0].name
    elif unit.function(fn) is None:
        _fail("unknown_function", fn)
    try:
        verdict = bounded_equivalence_oracle(unit, mutant, fn)
    except DomainTooLarge as e:
        _fail("domain_too_large", str(e))
    if verdict.equivalent:
        click.echo(f"equivalent over {verdict.domain}")
    else:
        click.echo(f"counterexample {verdict.fn}{verdict.args}: "
                   f"original {verdict.original} mutant {verdict.mutant}")


@main.command()
@click.argument("log_file")
def replay(log_file):
    """Fold an event log and print the scoreboard and state hash."""
    lines = [ln for ln in _read_text(log_file).splitlines() if ln]
    try:
        state = replay_log(lines)
    except CorruptLog as e:
        _fail("corrupt_log", str(e))
    board = scoreboard(state)
    click.echo(f"status: {state.status}  events: {state.last_seq}")
    for pid in sorted(board.players):
        name = state.players[pid]["name"]
        click.echo(f"  {pid} ({name}): {board.players[pid]}")
    for team in sorted(board.teams):
        click.echo(f"  team {team}: {board.teams[team]}")
    click.echo(f"state hash: {state_hash(state)}")


@main.command()
@click.option("--unit", "unit_file", required=True)
@click.option("--games", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", default=None,
              help="Directory for logs, report.json, games.csv, and figures.")
def sim(unit_file, games, seed, out_dir):
    """Run deterministic bot-vs-bot games and aggregate a report."""
    from .report import write_report
    from .sim import run_simulation
    _load_unit(unit_file)  # fail fast with a language error code
    source = _read_text(unit_file)
    try:
        report = run_simulation(source, games, seed, out_dir)
    except (EngineError, ValidationError, CheckError) as e:
        _fail(getattr(e, "code", "engine_error"), str(e))
    click.echo(f"games: {report.games}")
    click.echo(f"mean events: {report.mean_events:.2f}")
    click.echo(f"median events: {report.median_events:.2f}")
    if report.mutation_scores:
        mean_score = sum(report.mutation_scores) / len(report.mutation_scores)
        click.echo(f"mean mutation score: {mean_score:.4f}")
    click.echo(f"role points: attacker {report.role_points['attacker']}, "
               f"defender {report.role_points['defender']}")
    click.echo(f"wall clock: {report.wall_clock_seconds:.2f}s")
    if out_dir is not None:
        for path in write_report(report, out_dir):
            click.echo(f"wrote {path}")


if __name__ == "__main__":
    main()
