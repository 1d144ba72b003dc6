/** GameView: the client-side projection everything renders from.
 *
 * The view is derived solely from GET /games/{id} and /scoreboard; the
 * client holds no authoritative state beyond the event cursor.
 */

import type { GameResponse, MutantState, ScoreboardResponse } from "./types.js";

export interface MutantMarker {
  mutantId: string;
  /** Server state, or "claimed" while an equivalence claim is open. */
  state: MutantState | "claimed";
}

export interface LineAnnotation {
  number: number;
  text: string;
  covered: boolean;
  markers: MutantMarker[];
}

export interface GameView {
  gameId: string;
  status: string;
  unitName: string;
  lines: LineAnnotation[];
  playerScores: Record<string, number>;
  playerNames: Record<string, string>;
  teamScores: Record<string, number>;
  cursor: number;
}

export function buildView(
  game: GameResponse,
  board: ScoreboardResponse,
  cursor?: number,
): GameView {
  const covered = new Set(game.covered_lines);
  const sourceLines = game.unit_source.replace(/\n$/, "").split("\n");
  const lines: LineAnnotation[] = sourceLines.map((text, i) => ({
    number: i + 1,
    text,
    covered: covered.has(i + 1),
    markers: [],
  }));
  const mutantIds = Object.keys(game.mutants).sort();
  for (const mutantId of mutantIds) {
    const mutant = game.mutants[mutantId];
    const state = mutant.claimed ? "claimed" : mutant.state;
    for (const line of mutant.edited_lines) {
      if (line >= 1 && line <= lines.length) {
        lines[line - 1].markers.push({ mutantId, state });
      }
    }
  }
  const playerNames: Record<string, string> = {};
  for (const [id, info] of Object.entries(game.players)) {
    playerNames[id] = info.name;
  }
  return {
    gameId: game.game_id,
    status: game.status,
    unitName: game.unit_name,
    lines,
    playerScores: board.players,
    playerNames,
    teamScores: board.teams,
    cursor: cursor ?? game.last_seq,
  };
}
