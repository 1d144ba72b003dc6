import { describe, expect, it } from "vitest";

import { buildView } from "../src/view.js";
import { renderGame } from "../src/render.js";
import type { GameResponse, ScoreboardResponse } from "../src/types.js";
import goldenGame from "./fixtures/golden_game.json";
import goldenBoard from "./fixtures/golden_scoreboard.json";

const game = goldenGame as GameResponse;
const board = goldenBoard as ScoreboardResponse;

describe("golden game rendering", () => {
  it("highlights exactly the suite-covered lines {1,2}", () => {
    const screen = renderGame(buildView(game, board));
    const highlighted = screen.codeLines
      .filter((line) => line.highlighted)
      .map((line) => line.number);
    expect(highlighted).toEqual([1, 2]);
  });

  it("places two mutant icons on line 2 with correct states", () => {
    const screen = renderGame(buildView(game, board));
    const line2 = screen.codeLines.find((line) => line.number === 2)!;
    expect(line2.icons).toHaveLength(2);
    expect(line2.icons.map((icon) => icon.mutantId)).toEqual(["m1", "m2"]);
    expect(line2.icons.map((icon) => icon.style)).toEqual([
      "mutant-counter_killed",
      "mutant-killed",
    ]);
    const otherIcons = screen.codeLines
      .filter((line) => line.number !== 2)
      .flatMap((line) => line.icons);
    expect(otherIcons).toHaveLength(0);
  });

  it("shows per-player and per-team totals", () => {
    const screen = renderGame(buildView(game, board));
    expect(screen.playerRows).toEqual([
      { id: "p1", label: "Alice", points: 2 },
      { id: "p2", label: "Bob", points: 2 },
      { id: "p3", label: "Cara", points: 0 },
    ]);
    expect(screen.teamRows).toEqual([
      { id: "blue", label: "blue", points: 2 },
      { id: "red", label: "red", points: 2 },
    ]);
  });
});

describe("state mappings", () => {
  const emptyGame: GameResponse = {
    ...game,
    mutants: {},
    tests: {},
    covered_lines: [],
    players: {},
    last_seq: 1,
  };
  const emptyBoard: ScoreboardResponse = {
    players: {},
    teams: {},
    mutant_points: {},
    test_points: {},
  };

  it("renders an empty game with no highlights and an empty scoreboard", () => {
    const screen = renderGame(buildView(emptyGame, emptyBoard));
    expect(screen.codeLines.some((line) => line.highlighted)).toBe(false);
    expect(screen.codeLines.flatMap((line) => line.icons)).toHaveLength(0);
    expect(screen.playerRows).toEqual([]);
    expect(screen.teamRows).toEqual([]);
  });

  it("switches an icon from alive to killed style across polls", () => {
    const before: GameResponse = structuredClone(game);
    before.mutants.m2 = { ...before.mutants.m2, state: "alive" };
    const aliveIcon = renderGame(buildView(before, board))
      .codeLines[1].icons.find((icon) => icon.mutantId === "m2")!;
    expect(aliveIcon.style).toBe("mutant-alive");
    expect(aliveIcon.glyph).toBe("🐛");
    const killedIcon = renderGame(buildView(game, board))
      .codeLines[1].icons.find((icon) => icon.mutantId === "m2")!;
    expect(killedIcon.style).toBe("mutant-killed");
  });

  it("marks claimed mutants distinctly", () => {
    const claimed: GameResponse = structuredClone(game);
    claimed.mutants.m1 = { ...claimed.mutants.m1, state: "alive", claimed: true };
    const icon = renderGame(buildView(claimed, board))
      .codeLines[1].icons.find((i) => i.mutantId === "m1")!;
    expect(icon.style).toBe("mutant-claimed");
  });

  it("derives everything from the fetched payloads (stateless trust)", () => {
    const once = renderGame(buildView(game, board));
    const again = renderGame(buildView(structuredClone(game), structuredClone(board)));
    expect(again).toEqual(once);
  });
});
