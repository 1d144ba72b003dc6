"""Game engine: commands, scoring, claims, replay, and the golden fixture."""

import json

import pytest

from arena.engine import (CorruptLog, EngineError, Game, GameConfig,
                          RejectedEvent, apply_event, canonical_state,
                          event_from_json, event_to_canonical, replay,
                          scoreboard, state_hash)
from arena.sim import LogicalClock
from conftest import ABS_DIFF, build_golden_game


def new_game(**kwargs):
    return Game(GameConfig(ABS_DIFF, "abs_diff", **kwargs), clock=LogicalClock())


def joined_game(**kwargs):
    game = new_game(**kwargs)
    a = game.join("A", "attacker", "red")
    d = game.join("D", "defender", "blue")
    return game, a, d


A_PLUS_B = ABS_DIFF.replace("a - b", "a + b")
A_DIV_B = ABS_DIFF.replace("a - b", "a / b")
A_GE_B = ABS_DIFF.replace("a > b", "a >= b")

T_KILLS_PLUS = [{"fn": "abs_diff", "args": [4, 3], "expected": 1}]
T_SURVIVES_PLUS = [{"fn": "abs_diff", "args": [2, 7], "expected": 5}]


def test_golden_fixture_replays_byte_identically(golden_log_path):
    game = build_golden_game()
    built = "".join(event_to_canonical(e) + "\n" for e in game.events)
    assert built == golden_log_path.read_text(encoding="utf-8")
    replayed = replay(golden_log_path.read_text(encoding="utf-8").splitlines())
    assert canonical_state(replayed) == canonical_state(game.state)
    assert state_hash(replayed) == (
        "04c5bc46f910adbc1f6c30405e438d70ad907c4f2079d1173040061f10190a84")


def test_golden_scoreboard(golden_game):
    board = scoreboard(golden_game.state)
    assert board.players == {"p1": 2, "p2": 2, "p3": 0}
    assert board.teams == {"red": 2, "blue": 2}
    assert golden_game.state.suite_covered_lines() == {1, 2}
    states = {mid: m.state for mid, m in golden_game.state.mutants.items()}
    assert states == {"m1": "counter_killed", "m2": "killed"}


def test_join_roles_and_capacity():
    game = new_game(max_players_per_role=1)
    game.join("A", "attacker", "red")
    with pytest.raises(EngineError) as exc:
        game.join("A2", "attacker", "red")
    assert exc.value.code == "role_full"
    with pytest.raises(EngineError):
        game.join("X", "referee", "green")


def test_survival_scoring_accrues_per_test():
    game, a, d = joined_game()
    game.submit_test(d, T_SURVIVES_PLUS)
    game.submit_mutant(a, A_PLUS_B)  # survives t1: +1
    game.submit_test(d, [{"fn": "abs_diff", "args": [3, 9], "expected": 6}])
    m1 = game.state.mutants["m1"]
    assert m1.state == "alive"
    assert m1.accrued_points == len(m1.survived_test_ids) == 2
    assert game.state.scores[a] == 2


def test_kill_pays_one_plus_accrued():
    game, a, d = joined_game()
    game.submit_test(d, T_SURVIVES_PLUS)
    game.submit_mutant(a, A_PLUS_B)
    game.submit_test(d, T_KILLS_PLUS)
    assert game.state.mutants["m1"].state == "killed"
    assert game.state.scores[d] == 1 + 1  # kill bonus + 1 accrued
    assert game.state.scores[a] == 1      # survival point is kept


def test_stillborn_mutant_yields_nothing():
    game, a, d = joined_game()
    game.submit_test(d, T_KILLS_PLUS)
    events = game.submit_mutant(a, A_PLUS_B)
    assert [e.type for e in events] == ["mutant_accepted", "mutant_killed"]
    assert events[1].data["stillborn"] is True
    assert game.state.mutants["m1"].state == "stillborn"
    assert game.state.scores == {a: 0, d: 1}


def test_stillborn_killer_is_lowest_test_id():
    game, a, d = joined_game()
    game.submit_test(d, T_KILLS_PLUS)
    game.submit_test(d, [{"fn": "abs_diff", "args": [9, 4], "expected": 5}])
    events = game.submit_mutant(a, A_PLUS_B)
    assert events[1].data["test_id"] == "t1"


def test_rejected_submissions_emit_events_and_score_nothing():
    game, a, d = joined_game()
    events = game.submit_mutant(a, "fun abs_diff(a: int, b: int) -> int {")
    assert events[0].type == "mutant_rejected"
    assert events[0].data["reason"] == "syntax_error"
    events = game.submit_test(d, [{"fn": "abs_diff", "args": [4, 3],
                                   "expected": 2}])
    assert events[0].type == "test_rejected"
    assert events[0].data["reason"] == "assertion_fails_on_original"
    assert game.state.scores == {a: 0, d: 0}


def test_role_guards():
    game, a, d = joined_game()
    with pytest.raises(EngineError) as exc:
        game.submit_mutant(d, A_PLUS_B)
    assert exc.value.code == "not_attacker"
    with pytest.raises(EngineError) as exc:
        game.submit_test(a, T_KILLS_PLUS)
    assert exc.value.code == "not_defender"


def test_claimed_mutant_is_frozen_until_resolution():
    game, a, d = joined_game(claim_window=2)
    game.submit_mutant(a, A_PLUS_B)
    game.claim_equivalence(d, "m1")
    # A killing test does not touch the frozen mutant and no points accrue.
    events = game.submit_test(d, T_KILLS_PLUS)
    assert [e.type for e in events] == ["test_accepted"]
    assert game.state.mutants["m1"].state == "alive"
    assert game.state.mutants["m1"].accrued_points == 0
    # The claim window counts accepted tests; the second upholds the claim.
    events = game.submit_test(d, T_SURVIVES_PLUS)
    assert events[-1].type == "claim_upheld"
    assert game.state.mutants["m1"].state == "removed_equivalent"
    assert game.state.scores[d] == 1  # upheld claim bonus


def test_upheld_claim_strips_accrued_and_floors_at_zero():
    game, a, d = joined_game(claim_window=1)
    game.submit_test(d, T_SURVIVES_PLUS)
    game.submit_mutant(a, A_GE_B)  # survives: attacker +1
    game.claim_equivalence(d, "m1")
    game.submit_test(d, T_KILLS_PLUS)
    assert game.state.mutants["m1"].state == "removed_equivalent"
    assert game.state.scores[a] == 0  # +1 survival, -1 accrued, floored


def test_counter_claim_requires_author_and_kill():
    game, a, d = joined_game()
    a2 = game.join("A2", "attacker", "red")
    game.submit_mutant(a, A_PLUS_B)
    game.claim_equivalence(d, "m1")
    with pytest.raises(EngineError) as exc:
        game.counter_claim(a2, "m1", T_KILLS_PLUS)
    assert exc.value.code == "not_mutant_author"
    with pytest.raises(EngineError) as exc:
        game.counter_claim(a, "m1", T_SURVIVES_PLUS)
    assert exc.value.code == "counter_does_not_kill"
    before = game.state.last_seq
    game.counter_claim(a, "m1", T_KILLS_PLUS)
    assert game.state.last_seq == before + 1
    assert game.state.mutants["m1"].state == "counter_killed"
    assert game.state.scores[a] == 1


def test_counter_test_does_not_join_suite():
    game, a, d = joined_game()
    game.submit_mutant(a, A_PLUS_B)
    game.claim_equivalence(d, "m1")
    game.counter_claim(a, "m1", T_KILLS_PLUS)
    assert game.state.tests == {}


def test_claim_conflicts():
    game, a, d = joined_game()
    game.submit_mutant(a, A_PLUS_B)
    game.claim_equivalence(d, "m1")
    with pytest.raises(EngineError) as exc:
        game.claim_equivalence(d, "m1")
    assert exc.value.code == "claim_already_open"
    with pytest.raises(EngineError) as exc:
        game.claim_equivalence(d, "m9")
    assert exc.value.code == "mutant_not_alive"


def test_finish_upholds_open_claims():
    game, a, d = joined_game()
    game.submit_mutant(a, A_PLUS_B)
    game.claim_equivalence(d, "m1")
    events = game.finish()
    assert [e.type for e in events] == ["claim_upheld", "game_finished"]
    assert game.state.status == "finished"
    with pytest.raises(EngineError):
        game.submit_mutant(a, A_DIV_B)


def test_mutation_score_excludes_removed_equivalents():
    game, a, d = joined_game(claim_window=1)
    game.submit_mutant(a, A_PLUS_B)
    game.submit_mutant(a, A_GE_B)
    game.claim_equivalence(d, "m2")
    game.submit_test(d, T_KILLS_PLUS)  # kills m1, upholds the m2 claim
    assert game.mutation_score() == 1.0


def test_apply_event_rejects_gaps_and_unknown_types(golden_game):
    state = golden_game.state
    bad = event_from_json(event_to_canonical(golden_game.events[-1]))
    bad.seq = state.last_seq + 5
    with pytest.raises(RejectedEvent):
        apply_event(state, bad)
    bad.seq = state.last_seq + 1
    bad.type = "mystery"
    with pytest.raises(RejectedEvent):
        apply_event(state, bad)


def test_replay_detects_corruption(golden_log_path):
    lines = golden_log_path.read_text(encoding="utf-8").splitlines()
    with pytest.raises(CorruptLog):
        replay(lines[:3] + lines[4:])  # gap
    with pytest.raises(CorruptLog):
        replay(lines[:3] + ["{not json"])


def test_from_log_continues_play(golden_game):
    game = Game.from_log(golden_game.events, clock=LogicalClock())
    assert canonical_state(game.state) == canonical_state(golden_game.state)
    events = game.submit_mutant("p1", A_GE_B)
    assert events[0].data["mutant_id"] == "m3"
    assert events[0].seq == 13


def test_event_serialization_round_trip(golden_game):
    for event in golden_game.events:
        line = event_to_canonical(event)
        again = event_to_canonical(event_from_json(line))
        assert line == again
        assert json.loads(line)["seq"] == event.seq


def test_config_validation():
    with pytest.raises(EngineError):
        Game(GameConfig(ABS_DIFF, step_budget=-1))
    with pytest.raises(EngineError) as exc:
        Game(GameConfig("fun f( {"))
    assert exc.value.code == "invalid_unit"
