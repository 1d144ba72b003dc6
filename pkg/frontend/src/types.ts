/** Payload shapes of the arena server HTTP API (the only data source). */

export type Role = "attacker" | "defender";

export type MutantState =
  | "alive"
  | "stillborn"
  | "killed"
  | "counter_killed"
  | "removed_equivalent";

export interface PlayerInfo {
  name: string;
  role: Role;
  team: string;
}

export interface MutantInfo {
  attacker: string;
  state: MutantState;
  edited_lines: number[];
  accrued_points: number;
  claimed: boolean;
}

export interface AssertionRecord {
  fn: string;
  args: unknown[];
  expected: unknown;
}

export interface TestInfo {
  author: string;
  assertions: AssertionRecord[];
  covered_lines: number[];
}

export interface GameResponse {
  game_id: string;
  status: string;
  unit_source: string;
  unit_name: string;
  players: Record<string, PlayerInfo>;
  mutants: Record<string, MutantInfo>;
  tests: Record<string, TestInfo>;
  covered_lines: number[];
  claims: Record<string, { claimant: string; tests_seen: number }>;
  last_seq: number;
}

export interface ScoreboardResponse {
  players: Record<string, number>;
  teams: Record<string, number>;
  mutant_points: Record<string, number>;
  test_points: Record<string, number>;
}

export interface GameEvent {
  seq: number;
  ts: string;
  actor: string;
  type: string;
  data: Record<string, unknown>;
}

export interface JoinResponse {
  player_id: string;
  token: string;
}

export interface ApiErrorBody {
  error: { code: string; message: string };
}
