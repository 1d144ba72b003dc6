/** Headless renderer: GameView -> Screen, a plain structure a DOM layer
 * (or a test) can diff. Covered lines get the highlight class, each
 * mutant on a line gets one icon styled by its state. */

import type { GameView, MutantMarker } from "./view.js";

export interface Icon {
  mutantId: string;
  glyph: string;
  style: string;
}

export interface RenderedLine {
  number: number;
  text: string;
  highlighted: boolean;
  icons: Icon[];
}

export interface ScoreRow {
  id: string;
  label: string;
  points: number;
}

export interface Screen {
  title: string;
  status: string;
  codeLines: RenderedLine[];
  playerRows: ScoreRow[];
  teamRows: ScoreRow[];
  banner: string | null;
}

const ICON_BY_STATE: Record<MutantMarker["state"], Icon["glyph"]> = {
  alive: "🐛",
  claimed: "❓",
  killed: "✖",
  stillborn: "✖",
  counter_killed: "✖",
  removed_equivalent: "≡",
};

export function renderGame(view: GameView, banner: string | null = null): Screen {
  const codeLines: RenderedLine[] = view.lines.map((line) => ({
    number: line.number,
    text: line.text,
    highlighted: line.covered,
    icons: line.markers.map((marker) => ({
      mutantId: marker.mutantId,
      glyph: ICON_BY_STATE[marker.state],
      style: `mutant-${marker.state}`,
    })),
  }));
  const playerRows = Object.keys(view.playerScores)
    .sort()
    .map((id) => ({
      id,
      label: view.playerNames[id] ?? id,
      points: view.playerScores[id],
    }));
  const teamRows = Object.keys(view.teamScores)
    .sort()
    .map((id) => ({ id, label: id, points: view.teamScores[id] }));
  return {
    title: view.unitName,
    status: view.status,
    codeLines,
    playerRows,
    teamRows,
    banner,
  };
}
