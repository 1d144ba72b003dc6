"""Event-sourced game engine.

A game is an append-only log of GameEvents; GameState is a pure fold over
the log (apply_event).  Commands (join, submit_mutant, submit_test,
claim_equivalence, counter_claim, finish) validate against the current
state, run the mutation/testing machinery, and emit events; every effect
passes through apply_event so replaying the log reproduces the state
byte-for-byte under the canonical serialization.

Scoring:
  * a mutant earns its attacker +1 per accepted test it survives; its
    accrued points equal its survived-test count while alive
  * killing a mutant earns the test's author 1 + the mutant's accrued
    points; a mutant killed at submission (stillborn) yields its attacker
    nothing and its killer +1
  * a countered equivalence claim earns the attacker +1 bonus; an upheld
    claim earns the claimant +1 and costs the attacker the mutant's
    accrued points (each player's total is floored at 0)
  * claimed mutants are frozen: they stop accruing and are skipped by
    defender-test kill checks until the claim resolves
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field

from .lang import nodes as n
from .lang.errors import ParseError, TypeCheckFailed
from .lang.parser import parse_unit
from .lang.typecheck import check_unit
from .mutation import MutantLimits, ValidationError, validate_mutant_submission
from .testing import (Assertion, TestCase, TestRejection, kill_check,
                      validate_test)

DEFAULT_STEP_BUDGET = 100_000
DEFAULT_CLAIM_WINDOW = 5
DEFAULT_MAX_EVENTS = 10_000
DEFAULT_MAX_PLAYERS_PER_ROLE = 8

ROLES = ("attacker", "defender")

MUTANT_ALIVE = "alive"
MUTANT_STILLBORN = "stillborn"
MUTANT_KILLED = "killed"
MUTANT_COUNTER_KILLED = "counter_killed"  # claim countered: proven non-equivalent
MUTANT_REMOVED_EQUIVALENT = "removed_equivalent"


class EngineError(Exception):
    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class CorruptLog(Exception):
    def __init__(self, seq: int, message: str = "corrupt event log"):
        super().__init__(f"{message} at seq {seq}")
        self.seq = seq


@dataclass
class GameConfig:
    unit_source: str
    unit_name: str = "unit"
    max_players_per_role: int = DEFAULT_MAX_PLAYERS_PER_ROLE
    max_edited_nodes: int = 5
    max_assertions: int = 10
    step_budget: int = DEFAULT_STEP_BUDGET
    claim_window: int = DEFAULT_CLAIM_WINDOW
    max_events: int = DEFAULT_MAX_EVENTS

    def validate(self) -> None:
        for name in ("max_players_per_role", "max_edited_nodes", "max_assertions",
                     "step_budget", "claim_window", "max_events"):
            if getattr(self, name) <= 0:
                raise EngineError("invalid_config", f"{name} must be positive")

    def to_dict(self) -> dict:
        return {
            "unit_source": self.unit_source,
            "unit_name": self.unit_name,
            "max_players_per_role": self.max_players_per_role,
            "max_edited_nodes": self.max_edited_nodes,
            "max_assertions": self.max_assertions,
            "step_budget": self.step_budget,
            "claim_window": self.claim_window,
            "max_events": self.max_events,
        }

    @staticmethod
    def from_dict(d: dict) -> "GameConfig":
        return GameConfig(**{k: d[k] for k in GameConfig("x").to_dict() if k in d})


@dataclass
class GameEvent:
    seq: int
    ts: str  # UTC ISO-8601
    actor: str  # player id or "system"
    type: str
    data: dict


# Canonical field order per event type; serialization depends on it.
_EVENT_FIELDS = {
    "game_created": ("config",),
    "player_joined": ("player_id", "name", "role", "team"),
    "mutant_accepted": ("mutant_id", "source", "edited_lines", "edited_node_count",
                        "submission_id"),
    "mutant_rejected": ("reason", "message", "submission_id"),
    "test_accepted": ("test_id", "assertions", "covered_lines", "submission_id"),
    "test_rejected": ("reason", "message", "submission_id"),
    "mutant_killed": ("mutant_id", "test_id", "stillborn"),
    "mutant_survived_test": ("mutant_id", "test_id"),
    "equivalence_claimed": ("mutant_id",),
    "claim_countered": ("mutant_id", "assertions", "submission_id"),
    "claim_upheld": ("mutant_id",),
    "game_finished": (),
}


def event_to_canonical(event: GameEvent) -> str:
    """Fixed field order, no insignificant whitespace, base-10 integers."""
    data = {}
    for key in _EVENT_FIELDS[event.type]:
        if key in event.data:
            data[key] = event.data[key]
    payload = {"seq": event.seq, "ts": event.ts, "actor": event.actor,
               "type": event.type, "data": data}
    return json.dumps(payload, separators=(",", ":"))


def event_from_json(line: str) -> GameEvent:
    d = json.loads(line)
    return GameEvent(d["seq"], d["ts"], d["actor"], d["type"], d["data"])


@dataclass
class MutantRecord:
    id: str
    attacker: str
    source: str
    edited_lines: list[int]
    edited_node_count: int
    state: str = MUTANT_ALIVE
    accrued_points: int = 0
    survived_test_ids: list[str] = field(default_factory=list)
    killed_by: str | None = None


@dataclass
class TestRecord:
    id: str
    author: str
    assertions: list[dict]
    covered_lines: list[int]


@dataclass
class ClaimRecord:
    claimant: str
    tests_seen: int = 0


@dataclass
class GameState:
    config: GameConfig | None = None
    status: str = "empty"  # empty -> active -> finished
    last_seq: int = 0
    players: dict[str, dict] = field(default_factory=dict)
    mutants: dict[str, MutantRecord] = field(default_factory=dict)
    tests: dict[str, TestRecord] = field(default_factory=dict)
    claims: dict[str, ClaimRecord] = field(default_factory=dict)
    scores: dict[str, int] = field(default_factory=dict)

    def alive_mutants(self) -> list[MutantRecord]:
        return [m for m in self.mutants.values() if m.state == MUTANT_ALIVE]

    def suite_covered_lines(self) -> set[int]:
        covered: set[int] = set()
        for t in self.tests.values():
            covered |= set(t.covered_lines)
        return covered


class RejectedEvent(Exception):
    def __init__(self, reason: str, message: str = ""):
        super().__init__(message or reason)
        self.reason = reason


def apply_event(state: GameState, event: GameEvent) -> GameState:
    """Pure state transition; raises RejectedEvent leaving state unchanged."""
    if event.seq != state.last_seq + 1:
        raise RejectedEvent("out_of_order_event",
                            f"expected seq {state.last_seq + 1}, got {event.seq}")
    if state.status == "finished":
        raise RejectedEvent("game_not_active", "game already finished")
    if event.type != "game_created":
        if state.status == "empty":
            raise RejectedEvent("game_not_active", "game not created yet")
        if event.actor != "system" and event.actor not in state.players:
            if not (event.type == "player_joined"):
                raise RejectedEvent("actor_not_in_game", f"unknown actor {event.actor!r}")
    new = copy.deepcopy(state)
    new.last_seq = event.seq
    d = event.data
    if event.type == "game_created":
        if state.status != "empty":
            raise RejectedEvent("game_not_active", "game already created")
        new.config = GameConfig.from_dict(d["config"])
        new.status = "active"
    elif event.type == "player_joined":
        new.players[d["player_id"]] = {"name": d["name"], "role": d["role"],
                                       "team": d["team"]}
        new.scores[d["player_id"]] = 0
    elif event.type == "mutant_accepted":
        new.mutants[d["mutant_id"]] = MutantRecord(
            d["mutant_id"], event.actor, d["source"],
            list(d["edited_lines"]), d["edited_node_count"])
    elif event.type in ("mutant_rejected", "test_rejected"):
        pass  # score-neutral interaction record
    elif event.type == "test_accepted":
        new.tests[d["test_id"]] = TestRecord(
            d["test_id"], event.actor, list(d["assertions"]), list(d["covered_lines"]))
        for claim in new.claims.values():
            claim.tests_seen += 1
    elif event.type == "mutant_killed":
        mutant = new.mutants[d["mutant_id"]]
        killer = new.tests[d["test_id"]].author
        new.scores[killer] += 1 + mutant.accrued_points
        mutant.state = MUTANT_STILLBORN if d["stillborn"] else MUTANT_KILLED
        mutant.killed_by = d["test_id"]
    elif event.type == "mutant_survived_test":
        mutant = new.mutants[d["mutant_id"]]
        mutant.accrued_points += 1
        mutant.survived_test_ids.append(d["test_id"])
        new.scores[mutant.attacker] += 1
    elif event.type == "equivalence_claimed":
        new.claims[d["mutant_id"]] = ClaimRecord(claimant=event.actor)
    elif event.type == "claim_countered":
        mutant = new.mutants[d["mutant_id"]]
        mutant.state = MUTANT_COUNTER_KILLED
        new.scores[mutant.attacker] += 1
        del new.claims[d["mutant_id"]]
    elif event.type == "claim_upheld":
        mutant = new.mutants[d["mutant_id"]]
        claim = new.claims.pop(d["mutant_id"])
        mutant.state = MUTANT_REMOVED_EQUIVALENT
        new.scores[claim.claimant] += 1
        new.scores[mutant.attacker] = max(0, new.scores[mutant.attacker]
                                          - mutant.accrued_points)
    elif event.type == "game_finished":
        new.status = "finished"
    else:
        raise RejectedEvent("unknown_event", f"unknown event type {event.type!r}")
    return new


def replay(events) -> GameState:
    """Fold apply_event over an iterable of events (or serialized lines)."""
    state = GameState()
    for item in events:
        if isinstance(item, str):
            try:
                event = event_from_json(item)
            except (json.JSONDecodeError, KeyError) as e:
                raise CorruptLog(state.last_seq + 1, f"undecodable event: {e}") from e
        else:
            event = item
        if event.seq != state.last_seq + 1:
            raise CorruptLog(event.seq)
        state = apply_event(state, event)
    return state


# --- projections ---

@dataclass
class Scoreboard:
    players: dict[str, int]
    teams: dict[str, int]
    mutant_points: dict[str, int]  # survival points accrued per mutant
    test_points: dict[str, int]   # kill points earned per test


def scoreboard(state: GameState) -> Scoreboard:
    teams: dict[str, int] = {}
    for pid, info in state.players.items():
        teams[info["team"]] = teams.get(info["team"], 0) + state.scores.get(pid, 0)
    mutant_points = {mid: m.accrued_points for mid, m in state.mutants.items()}
    test_points: dict[str, int] = {tid: 0 for tid in state.tests}
    for m in state.mutants.values():
        if m.killed_by in test_points:
            test_points[m.killed_by] += 1 + m.accrued_points
    return Scoreboard(dict(state.scores), teams, mutant_points, test_points)


def canonical_state(state: GameState) -> str:
    """Canonical serialization of the full state; replay must reproduce it
    byte-for-byte."""
    doc = {
        "status": state.status,
        "last_seq": state.last_seq,
        "config": state.config.to_dict() if state.config else None,
        "players": {pid: state.players[pid] for pid in state.players},
        "mutants": {
            mid: {
                "attacker": m.attacker,
                "source": m.source,
                "edited_lines": sorted(m.edited_lines),
                "edited_node_count": m.edited_node_count,
                "state": m.state,
                "accrued_points": m.accrued_points,
                "survived_test_ids": m.survived_test_ids,
                "killed_by": m.killed_by,
            } for mid, m in state.mutants.items()
        },
        "tests": {
            tid: {
                "author": t.author,
                "assertions": t.assertions,
                "covered_lines": sorted(t.covered_lines),
            } for tid, t in state.tests.items()
        },
        "claims": {mid: {"claimant": c.claimant, "tests_seen": c.tests_seen}
                   for mid, c in state.claims.items()},
        "scores": dict(state.scores),
    }
    return json.dumps(doc, separators=(",", ":"), sort_keys=True)


def state_hash(state: GameState) -> str:
    return hashlib.sha256(canonical_state(state).encode("utf-8")).hexdigest()


# --- command layer ---

def _default_clock() -> str:
    import datetime
    return datetime.datetime.now(datetime.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


class Game:
    """Single-writer command wrapper around the event fold.

    Commands validate, emit events, apply them, and hand each applied
    event to the listener (persistence, analytics).  All randomness-free:
    given the same command sequence and clock, the log is identical.
    """

    def __init__(self, config: GameConfig, clock=None, listener=None):
        config.validate()
        try:
            self.unit = check_unit(parse_unit(config.unit_source, config.unit_name))
        except (ParseError, TypeCheckFailed) as e:
            raise EngineError("invalid_unit", str(e)) from e
        self.config = config
        self.clock = clock or _default_clock
        self.listener = listener
        self.state = GameState()
        self.events: list[GameEvent] = []
        self._next_player = 0
        self._next_mutant = 0
        self._next_test = 0
        self._mutant_units: dict[str, n.SourceUnit] = {}
        self._emit("system", "game_created", {"config": config.to_dict()})

    @staticmethod
    def from_log(events: list[GameEvent], clock=None, listener=None) -> "Game":
        """Rebuild a live game from its event log."""
        if not events or events[0].type != "game_created":
            raise CorruptLog(1, "log must start with game_created")
        config = GameConfig.from_dict(events[0].data["config"])
        game = Game.__new__(Game)
        game.config = config
        game.unit = check_unit(parse_unit(config.unit_source, config.unit_name))
        game.clock = clock or _default_clock
        game.listener = listener
        game.state = replay(events)
        game.events = list(events)
        game._next_player = len(game.state.players)
        game._next_mutant = len(game.state.mutants)
        game._next_test = sum(1 for e in events if e.type == "test_accepted")
        game._mutant_units = {}
        for mid, m in game.state.mutants.items():
            game._mutant_units[mid] = check_unit(parse_unit(m.source, config.unit_name))
        return game

    # -- internals --

    def _emit(self, actor: str, type_: str, data: dict) -> GameEvent:
        event = GameEvent(self.state.last_seq + 1, self.clock(), actor, type_, data)
        self.state = apply_event(self.state, event)
        self.events.append(event)
        if self.listener is not None:
            self.listener(event, self.state)
        return event

    def _require_active(self) -> None:
        if self.state.status != "active":
            raise EngineError("game_not_active", "game is not active")
        if self.state.last_seq >= self.config.max_events:
            raise EngineError("game_not_active", "event bound reached")

    def _require_role(self, player_id: str, role: str) -> None:
        info = self.state.players.get(player_id)
        if info is None:
            raise EngineError("actor_not_in_game", f"unknown player {player_id!r}")
        if info["role"] != role:
            raise EngineError(f"not_{role}", f"{player_id} is not an {role}"
                              if role == "attacker" else f"{player_id} is not a {role}")

    # -- commands --

    def join(self, name: str, role: str, team: str) -> str:
        self._require_active()
        if role not in ROLES:
            raise EngineError("invalid_role", f"role must be one of {ROLES}")
        occupied = sum(1 for p in self.state.players.values() if p["role"] == role)
        if occupied >= self.config.max_players_per_role:
            raise EngineError("role_full", f"no {role} slot left")
        self._next_player += 1
        player_id = f"p{self._next_player}"
        self._emit(player_id, "player_joined",
                   {"player_id": player_id, "name": name, "role": role, "team": team})
        return player_id

    def submit_mutant(self, attacker: str, edited_source: str,
                      submission_id: str | None = None) -> list[GameEvent]:
        self._require_active()
        self._require_role(attacker, "attacker")
        first = len(self.events)
        limits = MutantLimits(self.config.max_edited_nodes)
        try:
            mutant, summary = validate_mutant_submission(self.unit, edited_source, limits)
        except ValidationError as e:
            data = {"reason": e.code, "message": str(e)}
            if submission_id:
                data["submission_id"] = submission_id
            self._emit(attacker, "mutant_rejected", data)
            return self.events[first:]
        self._next_mutant += 1
        mid = f"m{self._next_mutant}"
        self._mutant_units[mid] = mutant.unit
        data = {"mutant_id": mid, "source": mutant.source,
                "edited_lines": sorted(mutant.edited_lines),
                "edited_node_count": mutant.edited_node_count}
        if submission_id:
            data["submission_id"] = submission_id
        self._emit(attacker, "mutant_accepted", data)
        # Run the existing suite against the newcomer, in test-id order.
        killer: str | None = None
        for tid in self.state.tests:
            test = self._test_case(tid)
            if kill_check(self.unit, mutant.unit, test, self.config.step_budget).killed:
                killer = tid
                break
        if killer is not None:
            self._emit("system", "mutant_killed",
                       {"mutant_id": mid, "test_id": killer, "stillborn": True})
        else:
            for tid in self.state.tests:
                self._emit("system", "mutant_survived_test",
                           {"mutant_id": mid, "test_id": tid})
        return self.events[first:]

    def submit_test(self, defender: str, assertions: list[dict],
                    submission_id: str | None = None) -> list[GameEvent]:
        self._require_active()
        self._require_role(defender, "defender")
        first = len(self.events)
        try:
            test = TestCase([Assertion.from_record(a) for a in assertions])
            valid = validate_test(self.unit, test, self.config.step_budget)
        except (TestRejection, KeyError, TypeError) as e:
            code = getattr(e, "code", "bad_assertion")
            data = {"reason": code, "message": str(e)}
            if submission_id:
                data["submission_id"] = submission_id
            self._emit(defender, "test_rejected", data)
            return self.events[first:]
        self._next_test += 1
        tid = f"t{self._next_test}"
        data = {"test_id": tid, "assertions": [a.to_record() for a in test.assertions],
                "covered_lines": sorted(valid.covered_lines)}
        if submission_id:
            data["submission_id"] = submission_id
        self._emit(defender, "test_accepted", data)
        # Check every alive, unclaimed mutant in mutant-id order.
        for mid in list(self.state.mutants):
            mutant = self.state.mutants[mid]
            if mutant.state != MUTANT_ALIVE or mid in self.state.claims:
                continue
            result = kill_check(self.unit, self._mutant_units[mid], test,
                                self.config.step_budget)
            if result.killed:
                self._emit("system", "mutant_killed",
                           {"mutant_id": mid, "test_id": tid, "stillborn": False})
            else:
                self._emit("system", "mutant_survived_test",
                           {"mutant_id": mid, "test_id": tid})
        self._resolve_claims()
        return self.events[first:]

    def claim_equivalence(self, defender: str, mutant_id: str) -> list[GameEvent]:
        self._require_active()
        self._require_role(defender, "defender")
        mutant = self.state.mutants.get(mutant_id)
        if mutant is None or mutant.state != MUTANT_ALIVE:
            raise EngineError("mutant_not_alive", f"{mutant_id} is not an alive mutant")
        if mutant_id in self.state.claims:
            raise EngineError("claim_already_open", f"{mutant_id} already has an open claim")
        first = len(self.events)
        self._emit(defender, "equivalence_claimed", {"mutant_id": mutant_id})
        return self.events[first:]

    def counter_claim(self, attacker: str, mutant_id: str, assertions: list[dict],
                      submission_id: str | None = None) -> list[GameEvent]:
        """Attacker answers an equivalence claim with a single-purpose test
        that must pass on the original and kill their own mutant."""
        self._require_active()
        self._require_role(attacker, "attacker")
        mutant = self.state.mutants.get(mutant_id)
        if mutant is None or mutant_id not in self.state.claims:
            raise EngineError("no_open_claim", f"no open claim on {mutant_id}")
        if mutant.attacker != attacker:
            raise EngineError("not_mutant_author", "only the mutant's author may counter")
        try:
            test = TestCase([Assertion.from_record(a) for a in assertions])
            validate_test(self.unit, test, self.config.step_budget)
        except (TestRejection, KeyError, TypeError) as e:
            raise EngineError(getattr(e, "code", "bad_assertion"), str(e)) from e
        result = kill_check(self.unit, self._mutant_units[mutant_id], test,
                            self.config.step_budget)
        if not result.killed:
            raise EngineError("counter_does_not_kill",
                              "counter test does not kill the claimed mutant")
        first = len(self.events)
        data = {"mutant_id": mutant_id,
                "assertions": [a.to_record() for a in test.assertions]}
        if submission_id:
            data["submission_id"] = submission_id
        self._emit(attacker, "claim_countered", data)
        return self.events[first:]

    def finish(self) -> list[GameEvent]:
        if self.state.status != "active":
            raise EngineError("game_not_active", "game is not active")
        first = len(self.events)
        for mid in list(self.state.claims):
            self._emit("system", "claim_upheld", {"mutant_id": mid})
        self._emit("system", "game_finished", {})
        return self.events[first:]

    # -- helpers --

    def _resolve_claims(self) -> None:
        for mid in list(self.state.claims):
            if self.state.claims[mid].tests_seen >= self.config.claim_window:
                self._emit("system", "claim_upheld", {"mutant_id": mid})

    def _test_case(self, test_id: str) -> TestCase:
        record = self.state.tests[test_id]
        return TestCase([Assertion.from_record(a) for a in record.assertions],
                        id=test_id, author=record.author)

    def mutation_score(self) -> float:
        """Killed mutants / accepted mutants (1.0 when no mutants)."""
        mutants = [m for m in self.state.mutants.values()
                   if m.state != MUTANT_REMOVED_EQUIVALENT]
        if not mutants:
            return 1.0
        killed = sum(1 for m in mutants if m.state in
                     (MUTANT_KILLED, MUTANT_STILLBORN, MUTANT_COUNTER_KILLED))
        return killed / len(mutants)
