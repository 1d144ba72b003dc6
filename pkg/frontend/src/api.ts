/** Thin typed client over fetch; every method maps one server route. */

import type {
  AssertionRecord,
  GameEvent,
  GameResponse,
  JoinResponse,
  Role,
  ScoreboardResponse,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

export class ArenaClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = fetch as unknown as FetchLike,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    token?: string,
  ): Promise<T> {
    const headers: Record<string, string> = {};
    if (body !== undefined) headers["Content-Type"] = "application/json";
    if (token !== undefined) headers["Authorization"] = `Bearer ${token}`;
    const response = await this.fetchFn(this.baseUrl + path, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const doc = (await response.json()) as Record<string, unknown>;
    if (response.status >= 400) {
      const err = (doc as { error?: { code?: string; message?: string } }).error;
      throw new ApiError(
        response.status,
        err?.code ?? "unknown_error",
        err?.message ?? `request failed with status ${response.status}`,
      );
    }
    return doc as T;
  }

  join(gameId: string, name: string, role: Role, team: string): Promise<JoinResponse> {
    return this.request("POST", `/games/${gameId}/join`, { name, role, team });
  }

  getGame(gameId: string): Promise<GameResponse> {
    return this.request("GET", `/games/${gameId}`);
  }

  getScoreboard(gameId: string): Promise<ScoreboardResponse> {
    return this.request("GET", `/games/${gameId}/scoreboard`);
  }

  async getEvents(gameId: string, since: number): Promise<GameEvent[]> {
    const doc = await this.request<{ events: GameEvent[] }>(
      "GET",
      `/games/${gameId}/events?since=${since}`,
    );
    return doc.events;
  }

  submitMutant(
    gameId: string,
    token: string,
    source: string,
    submissionId?: string,
  ): Promise<{ mutant_id: string; state: string; edited_lines: number[] }> {
    return this.request(
      "POST",
      `/games/${gameId}/mutants`,
      { source, submission_id: submissionId },
      token,
    );
  }

  submitTest(
    gameId: string,
    token: string,
    assertions: AssertionRecord[],
    submissionId?: string,
  ): Promise<{ test_id: string; covered_lines: number[]; kills: string[] }> {
    return this.request(
      "POST",
      `/games/${gameId}/tests`,
      { assertions, submission_id: submissionId },
      token,
    );
  }

  claimEquivalence(
    gameId: string,
    token: string,
    mutantId: string,
  ): Promise<{ mutant_id: string; state: string }> {
    return this.request(
      "POST",
      `/games/${gameId}/claims`,
      { mutant_id: mutantId },
      token,
    );
  }

  counterClaim(
    gameId: string,
    token: string,
    mutantId: string,
    assertions: AssertionRecord[],
  ): Promise<{ mutant_id: string; state: string }> {
    return this.request(
      "POST",
      `/games/${gameId}/claims/${mutantId}/counter`,
      { assertions },
      token,
    );
  }
}
