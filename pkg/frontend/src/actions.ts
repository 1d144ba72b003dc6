/** Submission actions shared by the mutant editor, the assertion builder,
 * and the claim buttons. Server validation errors (422) are mapped to
 * inline annotations; 401 triggers the re-join flow; 403 is surfaced
 * loudly because it means the role gate is broken. */

import { ApiError, type ArenaClient } from "./api.js";
import type { AssertionRecord } from "./types.js";

export type ActionResult =
  | { kind: "ok"; detail: Record<string, unknown> }
  | { kind: "invalid"; code: string; message: string; atLine: number | null }
  | { kind: "rejoin" }
  | { kind: "fatal"; message: string };

export interface Session {
  gameId: string;
  playerId: string;
  token: string;
}

function lineOf(message: string): number | null {
  // Validation messages carry "line:col:" or "line N" positions.
  const match = /(?:^|\s)(\d+):\d+:/.exec(message) ?? /line (\d+)/.exec(message);
  return match ? Number(match[1]) : null;
}

function mapError(error: unknown): ActionResult {
  if (error instanceof ApiError) {
    if (error.status === 422 || error.status === 409) {
      return {
        kind: "invalid",
        code: error.code,
        message: error.message,
        atLine: lineOf(error.message),
      };
    }
    if (error.status === 401) return { kind: "rejoin" };
    if (error.status === 403) {
      return { kind: "fatal", message: `role gate rejected the action: ${error.message}` };
    }
    return { kind: "fatal", message: error.message };
  }
  return { kind: "fatal", message: error instanceof Error ? error.message : String(error) };
}

export async function submitMutant(
  client: ArenaClient,
  session: Session,
  source: string,
  submissionId?: string,
): Promise<ActionResult> {
  try {
    const detail = await client.submitMutant(
      session.gameId,
      session.token,
      source,
      submissionId,
    );
    return { kind: "ok", detail };
  } catch (error) {
    return mapError(error);
  }
}

export async function submitTest(
  client: ArenaClient,
  session: Session,
  assertions: AssertionRecord[],
  submissionId?: string,
): Promise<ActionResult> {
  try {
    const detail = await client.submitTest(
      session.gameId,
      session.token,
      assertions,
      submissionId,
    );
    return { kind: "ok", detail };
  } catch (error) {
    return mapError(error);
  }
}

export async function claimEquivalence(
  client: ArenaClient,
  session: Session,
  mutantId: string,
): Promise<ActionResult> {
  try {
    const detail = await client.claimEquivalence(session.gameId, session.token, mutantId);
    return { kind: "ok", detail };
  } catch (error) {
    return mapError(error);
  }
}

export async function counterClaim(
  client: ArenaClient,
  session: Session,
  mutantId: string,
  assertions: AssertionRecord[],
): Promise<ActionResult> {
  try {
    const detail = await client.counterClaim(
      session.gameId,
      session.token,
      mutantId,
      assertions,
    );
    return { kind: "ok", detail };
  } catch (error) {
    return mapError(error);
  }
}
