import pathlib

import pytest

from arena.engine import Game, GameConfig
from arena.sim import LogicalClock

FIXTURES = pathlib.Path(__file__).parent.parent / "fixtures"

ABS_DIFF = (FIXTURES / "abs_diff.cut").read_text(encoding="utf-8")


def build_golden_game() -> Game:
    """Rebuild the committed golden game event-for-event."""
    game = Game(GameConfig(ABS_DIFF, "abs_diff"), clock=LogicalClock())
    p1 = game.join("Alice", "attacker", "red")
    game.join("Bob", "defender", "blue")
    p3 = game.join("Cara", "defender", "blue")
    game.submit_mutant(p1, ABS_DIFF.replace("a - b", "a + b"))
    game.claim_equivalence(p3, "m1")
    game.counter_claim(p1, "m1",
                       [{"fn": "abs_diff", "args": [4, 3], "expected": 1}])
    game.submit_test(p3, [{"fn": "abs_diff", "args": [4, 2], "expected": 2}])
    game.submit_mutant(p1, ABS_DIFF.replace("a - b", "a / b"))
    game.submit_test("p2", [{"fn": "abs_diff", "args": [5, 3], "expected": 2}])
    return game


@pytest.fixture
def abs_diff_source() -> str:
    return ABS_DIFF


@pytest.fixture
def abs_diff_unit():
    from arena.lang.parser import parse_unit
    from arena.lang.typecheck import check_unit
    return check_unit(parse_unit(ABS_DIFF, "abs_diff"))


@pytest.fixture
def golden_log_path() -> pathlib.Path:
    return FIXTURES / "golden_game.ndjson"


@pytest.fixture
def golden_game() -> Game:
    return build_golden_game()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run."""
    verdicts = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py" in rep.nodeid and rep.when == "call":
                name = rep.nodeid.split("::")[-1]
                verdicts.append((name, outcome))
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for name, outcome in verdicts:
            mark = "PASS" if outcome == "passed" else "FAIL"
            terminalreporter.write_line(f"{mark} {name}")
