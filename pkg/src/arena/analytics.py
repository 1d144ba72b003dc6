"""Learning-analytics tracker.

Every applied game event is converted 1:1 into an actor/verb/object/result
interaction statement (xAPI-like, without claiming conformance) and
appended to a local NDJSON log (the source of truth) and optionally
queued for batched delivery to a remote collector.  Remote delivery is
at-least-once with exponential backoff; tracker failure never blocks or
alters the game.
"""

from __future__ import annotations

import hashlib
import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path

log = logging.getLogger(__name__)

VERBS = ("started", "joined", "submitted_mutant", "submitted_test", "killed_mutant",
         "mutant_survived", "claimed_equivalence", "countered_claim", "claim_upheld",
         "finished")

BATCH_SIZE = 100
BACKOFF_BASE = 1.0
BACKOFF_FACTOR = 2.0
BACKOFF_CAP = 60.0


@dataclass
class AnalyticsStatement:
    actor: dict          # {"id": player id or "system", "name": display name}
    verb: str
    object: dict         # {"game": game id, "kind": entity kind, "id": entity id}
    timestamp: str       # UTC ISO-8601
    result: dict | None = None      # {"score_delta": int, "success": bool}
    extensions: dict = field(default_factory=dict)

    def to_canonical(self) -> str:
        doc = {"actor": self.actor, "verb": self.verb, "object": self.object,
               "timestamp": self.timestamp}
        if self.result is not None:
            doc["result"] = self.result
        doc["extensions"] = self.extensions
        return json.dumps(doc, separators=(",", ":"), sort_keys=True)

    @staticmethod
    def from_json(line: str) -> "AnalyticsStatement":
        d = json.loads(line)
        return AnalyticsStatement(d["actor"], d["verb"], d["object"], d["timestamp"],
                                  d.get("result"), d.get("extensions", {}))


SKIP = object()


def to_statement(event, state, game_id: str):
    """Map one applied GameEvent to a statement (or SKIP).

    ``state`` is the game state after the event was applied; it supplies
    display names and score context the payload alone does not carry.
    """
    def actor_for(player_id: str) -> dict:
        if player_id == "system":
            return {"id": "system", "name": "System"}
        info = state.players.get(player_id, {})
        return {"id": player_id, "name": info.get("name", player_id)}

    def obj(kind: str, entity_id: str | None = None) -> dict:
        return {"game": game_id, "kind": kind, "id": entity_id or game_id}

    d = event.data
    t = event.type
    ext: dict = {"seq": event.seq}
    if t == "game_created":
        return _stmt(actor_for("system"), "started", obj("game"), event.ts, None, ext)
    if t == "player_joined":
        ext["role"] = d["role"]
        ext["team"] = d["team"]
        return _stmt(actor_for(d["player_id"]), "joined", obj("game"), event.ts,
                     {"success": True}, ext)
    if t == "mutant_accepted":
        ext["source_hash"] = hashlib.sha256(d["source"].encode()).hexdigest()[:16]
        ext["edited_lines"] = d["edited_lines"]
        ext["edited_node_count"] = d["edited_node_count"]
        return _stmt(actor_for(event.actor), "submitted_mutant",
                     obj("mutant", d["mutant_id"]), event.ts, {"success": True}, ext)
    if t == "mutant_rejected":
        ext["reason"] = d["reason"]
        return _stmt(actor_for(event.actor), "submitted_mutant", obj("mutant"),
                     event.ts, {"success": False}, ext)
    if t == "test_accepted":
        ext["assertion_count"] = len(d["assertions"])
        ext["covered_lines"] = d["covered_lines"]
        return _stmt(actor_for(event.actor), "submitted_test",
                     obj("test", d["test_id"]), event.ts, {"success": True}, ext)
    if t == "test_rejected":
        ext["reason"] = d["reason"]
        return _stmt(actor_for(event.actor), "submitted_test", obj("test"),
                     event.ts, {"success": False}, ext)
    if t == "mutant_killed":
        mutant = state.mutants[d["mutant_id"]]
        killer = state.tests[d["test_id"]].author
        ext["stillborn"] = d["stillborn"]
        ext["accrued_points"] = mutant.accrued_points
        return _stmt(actor_for(killer), "killed_mutant",
                     obj("mutant", d["mutant_id"]), event.ts,
                     {"score_delta": 1 + mutant.accrued_points, "success": True}, ext)
    if t == "mutant_survived_test":
        mutant = state.mutants[d["mutant_id"]]
        ext["test_id"] = d["test_id"]
        ext["accrued_points"] = mutant.accrued_points
        return _stmt(actor_for(mutant.attacker), "mutant_survived",
                     obj("mutant", d["mutant_id"]), event.ts,
                     {"score_delta": 1, "success": True}, ext)
    if t == "equivalence_claimed":
        return _stmt(actor_for(event.actor), "claimed_equivalence",
                     obj("mutant", d["mutant_id"]), event.ts, None, ext)
    if t == "claim_countered":
        return _stmt(actor_for(event.actor), "countered_claim",
                     obj("mutant", d["mutant_id"]), event.ts,
                     {"score_delta": 1, "success": True}, ext)
    if t == "claim_upheld":
        mutant = state.mutants[d["mutant_id"]]
        ext["accrued_points"] = mutant.accrued_points
        return _stmt(actor_for("system"), "claim_upheld",
                     obj("mutant", d["mutant_id"]), event.ts,
                     {"score_delta": -mutant.accrued_points, "success": True}, ext)
    if t == "game_finished":
        return _stmt(actor_for("system"), "finished", obj("game"), event.ts, None, ext)
    return SKIP


def _stmt(actor, verb, object_, ts, result, ext) -> AnalyticsStatement:
    assert verb in VERBS
    return AnalyticsStatement(actor, verb, object_, ts, result, ext)


@dataclass
class DeliveryState:
    pending: int = 0
    delivered: int = 0
    failed: int = 0
    last_error: str | None = None


class RemoteSink:
    """Batched HTTP POST to <collector-url>/statements; 2xx acknowledges."""

    def __init__(self, url: str, session=None, timeout: float = 10.0):
        import requests
        self.url = url.rstrip("/") + "/statements"
        self.session = session or requests.Session()
        self.timeout = timeout

    def send(self, batch: list[AnalyticsStatement]) -> None:
        body = "[" + ",".join(s.to_canonical() for s in batch) + "]"
        resp = self.session.post(self.url, data=body,
                                 headers={"Content-Type": "application/json"},
                                 timeout=self.timeout)
        if not 200 <= resp.status_code < 300:
            raise SinkUnavailable(f"collector returned {resp.status_code}")


class SinkUnavailable(Exception):
    pass


class AnalyticsTracker:
    """Per-game tracker: local NDJSON log plus optional remote queue.

    emit() is called by the game engine (producer); flush() may run on a
    different thread (consumer).  A local-log write failure disables the
    tracker permanently but never raises into the engine.
    """

    def __init__(self, game_id: str, directory, remote_sink=None, time_fn=None):
        self.game_id = game_id
        self.path = Path(directory) / f"{game_id}.ndjson"
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self.remote_sink = remote_sink
        self.time_fn = time_fn or _monotonic
        self._lock = threading.Lock()
        self._queue: list[AnalyticsStatement] = []
        self._delivered = 0
        self._failed = 0
        self._last_error: str | None = None
        self._next_attempt = 0.0
        self._backoff = BACKOFF_BASE
        self.disabled = False

    def on_event(self, event, state) -> None:
        """Engine listener: convert and emit; never raises."""
        try:
            statement = to_statement(event, state, self.game_id)
            if statement is not SKIP:
                self.emit(statement)
        except Exception:
            log.exception("analytics tracker failed on event %s", event.seq)

    def emit(self, statement: AnalyticsStatement) -> None:
        if self.disabled:
            return
        try:
            with self._lock:
                with open(self.path, "a", encoding="utf-8") as f:
                    f.write(statement.to_canonical() + "\n")
        except OSError:
            # Fatal for the tracker, never for the game.
            log.exception("local analytics log write failed; tracker disabled")
            self.disabled = True
            return
        if self.remote_sink is not None:
            with self._lock:
                self._queue.append(statement)

    def flush(self) -> DeliveryState:
        """Attempt delivery of all pending batches (idempotent).

        Statements stay pending until the sink acknowledges; failures set
        an exponential backoff window (base 1 s, x2, cap 60 s) honoured by
        subsequent flushes, with unbounded retries.
        """
        if self.remote_sink is None:
            return self.delivery_state()
        now = self.time_fn()
        if now < self._next_attempt:
            return self.delivery_state()
        while True:
            with self._lock:
                batch = self._queue[:BATCH_SIZE]
            if not batch:
                break
            try:
                self.remote_sink.send(batch)
            except Exception as e:
                with self._lock:
                    self._failed += 1
                    self._last_error = str(e)
                self._next_attempt = now + self._backoff
                self._backoff = min(self._backoff * BACKOFF_FACTOR, BACKOFF_CAP)
                break
            with self._lock:
                del self._queue[:len(batch)]
                self._delivered += len(batch)
            self._backoff = BACKOFF_BASE
            self._next_attempt = 0.0
        return self.delivery_state()

    def delivery_state(self) -> DeliveryState:
        with self._lock:
            return DeliveryState(len(self._queue), self._delivered, self._failed,
                                 self._last_error)


def _monotonic() -> float:
    import time
    return time.monotonic()
