import { describe, expect, it } from "vitest";

import { ArenaClient } from "../src/api.js";
import { submitTest } from "../src/actions.js";
import { Poller } from "../src/poll.js";
import { buildView, type GameView } from "../src/view.js";
import type { GameEvent, GameResponse, ScoreboardResponse } from "../src/types.js";
import { FakeServer } from "./fake.js";

// A mid-game scenario: one alive mutant (a-b -> a+b on line 2), one
// defender with an empty suite.
function midGame(): {
  game: GameResponse;
  scoreboard: ScoreboardResponse;
  events: GameEvent[];
} {
  const unit =
    "fun abs_diff(a: int, b: int) -> int {\n" +
    "  if (a > b) { return a - b; }\n" +
    "  return b - a;\n" +
    "}\n";
  return {
    game: {
      game_id: "g1",
      status: "active",
      unit_source: unit,
      unit_name: "abs_diff",
      players: {
        p1: { name: "A", role: "attacker", team: "red" },
        p2: { name: "D", role: "defender", team: "blue" },
      },
      mutants: {
        m1: {
          attacker: "p1",
          state: "alive",
          edited_lines: [2],
          accrued_points: 0,
          claimed: false,
        },
      },
      tests: {},
      covered_lines: [],
      claims: {},
      last_seq: 4,
    },
    scoreboard: {
      players: { p1: 0, p2: 0 },
      teams: { red: 0, blue: 0 },
      mutant_points: { m1: 0 },
      test_points: {},
    },
    events: [],
  };
}

const session = { gameId: "g1", playerId: "p2", token: "token" };

describe("defender submission round-trip", () => {
  it("updates the scoreboard within one poll", async () => {
    const server = new FakeServer({
      ...midGame(),
      token: "token",
      kills: () => true,
    });
    const client = new ArenaClient("", server.fetch);
    const views: GameView[] = [];
    const poller = new Poller(client, "g1", { onView: (v) => views.push(v) });

    const result = await submitTest(client, session, [
      { fn: "abs_diff", args: [5, 3], expected: 2 },
    ]);
    expect(result.kind).toBe("ok");
    if (result.kind === "ok") {
      expect(result.detail.kills).toEqual(["m1"]);
    }

    await poller.tick(); // one poll interval's worth of refresh
    const view = views.at(-1)!;
    expect(view.playerScores).toEqual({ p1: 0, p2: 1 });
    expect(view.teamScores).toEqual({ red: 0, blue: 1 });
    const line2 = view.lines[1];
    expect(line2.markers).toEqual([{ mutantId: "m1", state: "killed" }]);
    expect(view.lines.filter((l) => l.covered).map((l) => l.number)).toEqual([1, 2]);
    // The fake's scoreboard is what GET /scoreboard returns: they match.
    const board = await client.getScoreboard("g1");
    expect(view.playerScores).toEqual(board.players);
  });

  it("accrues a survival point when the test misses", async () => {
    const server = new FakeServer({
      ...midGame(),
      token: "token",
      kills: () => false,
    });
    const client = new ArenaClient("", server.fetch);
    const result = await submitTest(client, session, [
      { fn: "abs_diff", args: [2, 7], expected: 5 },
    ]);
    expect(result.kind).toBe("ok");
    const board = await client.getScoreboard("g1");
    expect(board.players).toEqual({ p1: 1, p2: 0 });
  });
});

describe("error mapping", () => {
  it("renders 422 validation messages inline at the reported line", async () => {
    const server = new FakeServer({
      ...midGame(),
      token: "token",
      rejectTests: {
        code: "syntax_error",
        message: "2:15: expected an expression",
      },
    });
    const client = new ArenaClient("", server.fetch);
    const result = await submitTest(client, session, []);
    expect(result).toEqual({
      kind: "invalid",
      code: "syntax_error",
      message: "2:15: expected an expression",
      atLine: 2,
    });
  });

  it("maps 401 to the re-join flow", async () => {
    const server = new FakeServer({ ...midGame(), token: "other" });
    const client = new ArenaClient("", server.fetch);
    const result = await submitTest(client, session, []);
    expect(result).toEqual({ kind: "rejoin" });
  });
});

describe("view projection", () => {
  it("holds no authoritative state beyond the cursor", () => {
    const { game, scoreboard } = midGame();
    const view = buildView(game, scoreboard);
    expect(view.cursor).toBe(game.last_seq);
    expect(view.lines).toHaveLength(4);
    expect(view.lines[1].markers[0]).toEqual({ mutantId: "m1", state: "alive" });
  });
});
