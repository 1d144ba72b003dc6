"""HTTP service exposing game lifecycle, submissions, scoreboard, coverage,
and a polling event feed.

Games persist as append-only NDJSON event logs (file per game); recovery is
replay.  Every accepted event is appended and fsynced before the HTTP
response is sent, so response-visible state never runs ahead of disk.
Mutation endpoints accept a client-supplied ``submission_id`` and replay the
original response on duplicates.
"""

from __future__ import annotations

import json
import logging
import secrets
import threading
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .analytics import AnalyticsTracker, RemoteSink
from .engine import (CorruptLog, EngineError, Game, GameConfig, GameEvent,
                     event_from_json, event_to_canonical, scoreboard,
                     state_hash)
from .mutation import ValidationError

log = logging.getLogger(__name__)

MAX_BODY_BYTES = 128 * 1024

# Engine error code -> HTTP status.  Unlisted codes are state conflicts.
_STATUS_BY_CODE = {
    "not_attacker": 403,
    "not_defender": 403,
    "actor_not_in_game": 401,
    "invalid_config": 422,
    "invalid_unit": 422,
    "invalid_role": 422,
    "counter_does_not_kill": 422,
    "bad_assertion": 422,
}


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code


class StorageFailure(Exception):
    pass


class GameSession:
    """One live game: engine, write-ahead log, tokens, idempotency cache."""

    def __init__(self, game_id: str, game: Game, log_path: Path, tracker=None):
        self.id = game_id
        self.game = game
        self.log_path = log_path
        self.tracker = tracker
        self.lock = threading.Lock()
        self.tokens: dict[str, str] = {}        # token -> player id
        self.creator_token: str = ""
        self.responses: dict[str, tuple[int, dict]] = {}  # submission id -> reply
        self.read_only = False
        game.listener = self._on_event

    def _on_event(self, event: GameEvent, state) -> None:
        try:
            with open(self.log_path, "a", encoding="utf-8") as f:
                f.write(event_to_canonical(event) + "\n")
                f.flush()
                import os
                os.fsync(f.fileno())
        except OSError as e:
            self.read_only = True
            raise StorageFailure(str(e)) from e
        if self.tracker is not None:
            self.tracker.on_event(event, state)

    def issue_token(self, player_id: str) -> str:
        # Replace any earlier token for the same player.
        for tok, pid in list(self.tokens.items()):
            if pid == player_id:
                del self.tokens[tok]
        token = secrets.token_hex(16)
        self.tokens[token] = player_id
        return token

    def save_tokens(self, directory: Path) -> None:
        doc = {"creator_token": self.creator_token, "tokens": self.tokens}
        path = directory / f"{self.id}.tokens.json"
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps(doc), encoding="utf-8")
        tmp.replace(path)

    def load_tokens(self, directory: Path) -> None:
        path = directory / f"{self.id}.tokens.json"
        if path.exists():
            doc = json.loads(path.read_text(encoding="utf-8"))
            self.creator_token = doc.get("creator_token", "")
            self.tokens = dict(doc.get("tokens", {}))


def _read_log(path: Path) -> list[GameEvent]:
    """Parse a game log, dropping a truncated final line with a warning."""
    raw = path.read_text(encoding="utf-8")
    lines = raw.split("\n")
    trailing = lines.pop()  # text after the last newline; "" when intact
    if trailing:
        log.warning("dropping truncated final line of %s", path)
    events = []
    for i, line in enumerate(lines):
        if not line:
            continue
        try:
            events.append(event_from_json(line))
        except (json.JSONDecodeError, KeyError) as e:
            if i == len(lines) - 1:
                log.warning("dropping undecodable final line of %s", path)
                break
            raise CorruptLog(i + 1, f"undecodable event: {e}") from e
    return events


def _rebuild_responses(events: list[GameEvent]) -> dict[str, tuple[int, dict]]:
    """Recover the idempotency cache: group each submission's event with its
    trailing system effects and rebuild the reply that was sent for it."""
    responses: dict[str, tuple[int, dict]] = {}
    open_sid: str | None = None
    slice_events: list[GameEvent] = []
    for event in events:
        sid = event.data.get("submission_id")
        if sid is not None:
            if open_sid is not None:
                responses[open_sid] = _response_for(slice_events)
            open_sid, slice_events = sid, [event]
        elif open_sid is not None and event.actor == "system" and event.type in (
                "mutant_killed", "mutant_survived_test", "claim_upheld"):
            slice_events.append(event)
        else:
            if open_sid is not None:
                responses[open_sid] = _response_for(slice_events)
                open_sid, slice_events = None, []
    if open_sid is not None:
        responses[open_sid] = _response_for(slice_events)
    return responses


def _response_for(slice_events: list[GameEvent]) -> tuple[int, dict]:
    """The reply for a submission is a pure function of its event slice."""
    head = slice_events[0]
    d = head.data
    if head.type in ("mutant_rejected", "test_rejected"):
        return 422, {"error": {"code": d["reason"], "message": d["message"]}}
    if head.type == "mutant_accepted":
        killed = any(e.type == "mutant_killed" for e in slice_events)
        return 200, {"mutant_id": d["mutant_id"],
                     "state": "stillborn" if killed else "alive",
                     "edited_lines": d["edited_lines"]}
    if head.type == "test_accepted":
        kills = [e.data["mutant_id"] for e in slice_events
                 if e.type == "mutant_killed"]
        return 200, {"test_id": d["test_id"],
                     "covered_lines": d["covered_lines"], "kills": kills}
    if head.type == "claim_countered":
        return 200, {"mutant_id": d["mutant_id"], "state": "counter_killed"}
    raise ValueError(f"unexpected submission head {head.type}")


def create_app(data_dir, analytics_url: str | None = None,
               analytics_disabled: bool = False) -> FastAPI:
    data_dir = Path(data_dir)
    games_dir = data_dir / "games"
    analytics_dir = data_dir / "analytics"
    games_dir.mkdir(parents=True, exist_ok=True)

    app = FastAPI(title="code-arena")
    sessions: dict[str, GameSession] = {}
    sessions_lock = threading.Lock()

    def make_tracker(game_id: str):
        if analytics_disabled:
            return None
        sink = RemoteSink(analytics_url) if analytics_url else None
        return AnalyticsTracker(game_id, analytics_dir, remote_sink=sink)

    def get_session(game_id: str) -> GameSession:
        with sessions_lock:
            session = sessions.get(game_id)
            if session is not None:
                return session
            log_path = games_dir / f"{game_id}.ndjson"
            if not log_path.exists():
                raise ApiError(404, "unknown_game", f"no game {game_id!r}")
            events = _read_log(log_path)
            game = Game.from_log(events)
            session = GameSession(game_id, game, log_path, make_tracker(game_id))
            session.load_tokens(games_dir)
            session.responses = _rebuild_responses(events)
            sessions[game_id] = session
            return session

    def authed_player(session: GameSession, request: Request) -> str:
        header = request.headers.get("authorization", "")
        if not header.startswith("Bearer "):
            raise ApiError(401, "missing_token", "Authorization: Bearer token required")
        token = header[len("Bearer "):]
        player = session.tokens.get(token)
        if player is None:
            raise ApiError(401, "bad_token", "unrecognized token")
        return player

    def require_role(session: GameSession, player: str, role: str) -> None:
        info = session.game.state.players.get(player)
        if info is None or info["role"] != role:
            raise ApiError(403, f"not_{role}", f"this action needs the {role} role")

    def guard_writable(session: GameSession) -> None:
        if session.read_only:
            raise ApiError(503, "storage_failure",
                           "game is read-only after a storage failure")

    async def parse_body(request: Request) -> dict:
        body = await request.body()
        if len(body) > MAX_BODY_BYTES:
            raise ApiError(413, "body_too_large",
                           f"request body exceeds {MAX_BODY_BYTES} bytes")
        try:
            doc = json.loads(body or b"{}")
        except json.JSONDecodeError as e:
            raise ApiError(422, "bad_json", f"body is not valid JSON: {e}")
        if not isinstance(doc, dict):
            raise ApiError(422, "bad_json", "body must be a JSON object")
        return doc

    def engine_guard(session: GameSession, fn, *args, **kwargs):
        guard_writable(session)
        try:
            return fn(*args, **kwargs)
        except StorageFailure as e:
            raise ApiError(503, "storage_failure", str(e))
        except (EngineError, ValidationError) as e:
            status = _STATUS_BY_CODE.get(e.code, 409)
            raise ApiError(status, e.code, str(e))

    @app.exception_handler(ApiError)
    async def on_api_error(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"error": {"code": exc.code,
                                               "message": str(exc)}})

    @app.post("/games", status_code=201)
    async def create_game(request: Request):
        doc = await parse_body(request)
        try:
            config = GameConfig.from_dict(doc.get("config", doc))
        except TypeError as e:
            raise ApiError(422, "invalid_config", str(e))
        game_id = "g" + secrets.token_hex(6)
        log_path = games_dir / f"{game_id}.ndjson"
        session = GameSession(game_id, Game.__new__(Game), log_path)
        try:
            # The creation event must hit disk before we answer.
            game = Game(config, listener=session._on_event)
        except StorageFailure as e:
            raise ApiError(503, "storage_failure", str(e))
        except EngineError as e:
            log_path.unlink(missing_ok=True)
            raise ApiError(422, e.code, str(e))
        session.game = game
        session.tracker = make_tracker(game_id)
        session.creator_token = secrets.token_hex(16)
        session.save_tokens(games_dir)
        # Re-feed the creation event to the late-attached tracker.
        if session.tracker is not None:
            session.tracker.on_event(game.events[0], game.state)
        game.listener = session._on_event
        with sessions_lock:
            sessions[game_id] = session
        return {"game_id": game_id, "creator_token": session.creator_token}

    @app.post("/games/{game_id}/join")
    async def join(game_id: str, request: Request):
        session = get_session(game_id)
        doc = await parse_body(request)
        for key in ("name", "role", "team"):
            if not isinstance(doc.get(key), str) or not doc[key]:
                raise ApiError(422, "invalid_join", f"{key!r} must be a non-empty string")
        with session.lock:
            player_id = engine_guard(session, session.game.join,
                                     doc["name"], doc["role"], doc["team"])
            token = session.issue_token(player_id)
            session.save_tokens(games_dir)
        return {"player_id": player_id, "token": token}

    @app.get("/games/{game_id}")
    async def get_game(game_id: str):
        session = get_session(game_id)
        state = session.game.state
        config = session.game.config
        return {
            "game_id": game_id,
            "status": state.status,
            "unit_source": config.unit_source,
            "unit_name": config.unit_name,
            "players": state.players,
            "mutants": {
                mid: {"attacker": m.attacker, "state": m.state,
                      "edited_lines": sorted(m.edited_lines),
                      "accrued_points": m.accrued_points,
                      "claimed": mid in state.claims}
                for mid, m in state.mutants.items()
            },
            "tests": {
                tid: {"author": t.author, "assertions": t.assertions,
                      "covered_lines": sorted(t.covered_lines)}
                for tid, t in state.tests.items()
            },
            "covered_lines": sorted(state.suite_covered_lines()),
            "claims": {mid: {"claimant": c.claimant, "tests_seen": c.tests_seen}
                       for mid, c in state.claims.items()},
            "last_seq": state.last_seq,
        }

    def submit(session: GameSession, command, submission_id, *args):
        """Run a submission command under the game lock with idempotent
        submission-id replay; the reply is derived from the event slice."""
        with session.lock:
            if submission_id and submission_id in session.responses:
                return session.responses[submission_id]
            slice_events = engine_guard(session, command, *args,
                                        submission_id=submission_id or None)
            reply = _response_for(slice_events)
            if submission_id:
                session.responses[submission_id] = reply
            if session.tracker is not None:
                session.tracker.flush()
            return reply

    @app.post("/games/{game_id}/mutants")
    async def post_mutant(game_id: str, request: Request):
        session = get_session(game_id)
        doc = await parse_body(request)
        player = authed_player(session, request)
        require_role(session, player, "attacker")
        if not isinstance(doc.get("source"), str):
            raise ApiError(422, "invalid_body", "'source' must be a string")
        status, body = submit(session, session.game.submit_mutant,
                              doc.get("submission_id"), player, doc["source"])
        return JSONResponse(status_code=status, content=body)

    @app.post("/games/{game_id}/tests")
    async def post_test(game_id: str, request: Request):
        session = get_session(game_id)
        doc = await parse_body(request)
        player = authed_player(session, request)
        require_role(session, player, "defender")
        if not isinstance(doc.get("assertions"), list):
            raise ApiError(422, "invalid_body", "'assertions' must be a list")
        status, body = submit(session, session.game.submit_test,
                              doc.get("submission_id"), player, doc["assertions"])
        return JSONResponse(status_code=status, content=body)

    @app.post("/games/{game_id}/claims")
    async def post_claim(game_id: str, request: Request):
        session = get_session(game_id)
        doc = await parse_body(request)
        player = authed_player(session, request)
        require_role(session, player, "defender")
        if not isinstance(doc.get("mutant_id"), str):
            raise ApiError(422, "invalid_body", "'mutant_id' must be a string")
        with session.lock:
            engine_guard(session, session.game.claim_equivalence,
                         player, doc["mutant_id"])
            if session.tracker is not None:
                session.tracker.flush()
        return {"mutant_id": doc["mutant_id"], "state": "claimed"}

    @app.post("/games/{game_id}/claims/{mutant_id}/counter")
    async def post_counter(game_id: str, mutant_id: str, request: Request):
        session = get_session(game_id)
        doc = await parse_body(request)
        player = authed_player(session, request)
        require_role(session, player, "attacker")
        if not isinstance(doc.get("assertions"), list):
            raise ApiError(422, "invalid_body", "'assertions' must be a list")
        with session.lock:
            sid = doc.get("submission_id")
            if sid and sid in session.responses:
                status, body = session.responses[sid]
                return JSONResponse(status_code=status, content=body)
            slice_events = engine_guard(session, session.game.counter_claim,
                                        player, mutant_id, doc["assertions"],
                                        submission_id=sid or None)
            reply = _response_for(slice_events)
            if sid:
                session.responses[sid] = reply
            if session.tracker is not None:
                session.tracker.flush()
        return JSONResponse(status_code=reply[0], content=reply[1])

    @app.get("/games/{game_id}/scoreboard")
    async def get_scoreboard(game_id: str):
        session = get_session(game_id)
        board = scoreboard(session.game.state)
        return {"players": board.players, "teams": board.teams,
                "mutant_points": board.mutant_points,
                "test_points": board.test_points}

    @app.get("/games/{game_id}/events")
    async def get_events(game_id: str, since: int = 0):
        session = get_session(game_id)
        events = [json.loads(event_to_canonical(e))
                  for e in session.game.events if e.seq > since]
        return {"events": events}

    @app.post("/games/{game_id}/finish")
    async def post_finish(game_id: str, request: Request):
        session = get_session(game_id)
        header = request.headers.get("authorization", "")
        token = header[len("Bearer "):] if header.startswith("Bearer ") else ""
        if not token:
            raise ApiError(401, "missing_token", "creator token required")
        if token != session.creator_token:
            raise ApiError(403, "not_creator", "only the game creator may finish")
        with session.lock:
            engine_guard(session, session.game.finish)
            if session.tracker is not None:
                session.tracker.flush()
        board = scoreboard(session.game.state)
        return {"status": "finished", "players": board.players,
                "teams": board.teams,
                "state_hash": state_hash(session.game.state)}

    app.state.sessions = sessions
    app.state.data_dir = data_dir
    return app


def serve(port: int, data_dir, analytics_url: str | None = None,
          analytics_disabled: bool = False) -> None:
    import uvicorn
    app = create_app(data_dir, analytics_url, analytics_disabled)
    uvicorn.run(app, host="0.0.0.0", port=port)
