"""Deterministic bot-vs-bot simulation and report aggregation."""

from __future__ import annotations

import json
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

from .analytics import AnalyticsTracker
from .bots import AttackerBot, DefenderBot
from .engine import Game, GameConfig, event_to_canonical, scoreboard


class LogicalClock:
    """Counter-driven UTC timestamps; keeps transcripts seed-deterministic."""

    def __init__(self, epoch: str = "2026-01-01T00:00:00Z"):
        import datetime
        self._t = datetime.datetime.strptime(epoch, "%Y-%m-%dT%H:%M:%SZ")

    def __call__(self) -> str:
        import datetime
        self._t += datetime.timedelta(seconds=1)
        return self._t.strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass
class GameRecord:
    game_id: str
    seed: int
    events: int
    mutation_score: float
    attacker_points: int
    defender_points: int


@dataclass
class SimReport:
    games: int
    mean_events: float
    median_events: float
    mutation_scores: list[float]
    role_points: dict[str, int]
    wall_clock_seconds: float
    records: list[GameRecord] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "games": self.games,
            "mean_events": self.mean_events,
            "median_events": self.median_events,
            "mutation_scores": self.mutation_scores,
            "role_points": self.role_points,
            "wall_clock_seconds": self.wall_clock_seconds,
            "per_game": [{
                "game_id": r.game_id, "seed": r.seed, "events": r.events,
                "mutation_score": r.mutation_score,
                "attacker_points": r.attacker_points,
                "defender_points": r.defender_points,
            } for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"), sort_keys=True)


def run_game(unit_source: str, seed: int, game_id: str,
             out_dir: Path | None = None,
             config: GameConfig | None = None) -> tuple[Game, GameRecord]:
    """One bot-vs-bot game; two consecutive passes (or the event bound)
    end it.  The full log and analytics statements land under out_dir."""
    config = config or GameConfig(unit_source)
    log_file = None
    tracker = None
    if out_dir is not None:
        games_dir = out_dir / "games"
        games_dir.mkdir(parents=True, exist_ok=True)
        log_file = open(games_dir / f"{game_id}.ndjson", "w", encoding="utf-8")
        tracker = AnalyticsTracker(game_id, out_dir / "analytics")

    def listener(event, state):
        if log_file is not None:
            log_file.write(event_to_canonical(event) + "\n")
        if tracker is not None:
            tracker.on_event(event, state)

    game = Game(config, clock=LogicalClock(), listener=listener)
    attacker_id = game.join("AttackerBot", "attacker", "red")
    defender_id = game.join("DefenderBot", "defender", "blue")
    attacker = AttackerBot(attacker_id, seed)
    defender = DefenderBot(defender_id, seed + 1)
    passes = 0
    turn = 0
    while passes < 2 and game.state.last_seq < config.max_events - 2:
        bot = attacker if turn % 2 == 0 else defender
        moved = bot.move(game)
        passes = 0 if moved else passes + 1
        turn += 1
    game.finish()
    if log_file is not None:
        log_file.close()
    board = scoreboard(game.state)
    roles = {pid: info["role"] for pid, info in game.state.players.items()}
    record = GameRecord(
        game_id, seed, game.state.last_seq, game.mutation_score(),
        sum(p for pid, p in board.players.items() if roles[pid] == "attacker"),
        sum(p for pid, p in board.players.items() if roles[pid] == "defender"))
    return game, record


def run_simulation(unit_source: str, n_games: int, seed: int,
                   out_dir=None, config: GameConfig | None = None) -> SimReport:
    """Run n seeded games; the report is reproducible from (seed, config)
    in every field except wall_clock_seconds."""
    out_path = Path(out_dir) if out_dir is not None else None
    start = time.monotonic()
    records: list[GameRecord] = []
    for i in range(n_games):
        game_seed = seed * 100_000 + i
        game_id = f"sim-{seed}-{i:04d}"
        _, record = run_game(unit_source, game_seed, game_id, out_path, config)
        records.append(record)
    wall = time.monotonic() - start
    lengths = [r.events for r in records]
    report = SimReport(
        games=len(records),
        mean_events=statistics.fmean(lengths) if lengths else 0.0,
        median_events=float(statistics.median(lengths)) if lengths else 0.0,
        mutation_scores=[r.mutation_score for r in records],
        role_points={
            "attacker": sum(r.attacker_points for r in records),
            "defender": sum(r.defender_points for r in records),
        },
        wall_clock_seconds=wall,
        records=records,
    )
    if out_path is not None:
        out_path.mkdir(parents=True, exist_ok=True)
        (out_path / "report.json").write_text(report.to_json() + "\n",
                                              encoding="utf-8")
    return report
