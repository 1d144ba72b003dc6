/** Event-feed poll loop.
 *
 * Every interval (default 2 s) fetch /events?since=<cursor>; when new
 * events arrive, refetch game + scoreboard and publish a fresh view.
 * The cursor only moves forward, no event is processed twice, and at
 * most one poll is in flight. Fetch failures surface through onError as
 * a non-blocking banner; the loop keeps retrying.
 */

import type { ArenaClient } from "./api.js";
import type { GameEvent } from "./types.js";
import { buildView, type GameView } from "./view.js";

export interface PollerOptions {
  intervalMs?: number;
  onView: (view: GameView) => void;
  onEvents?: (events: GameEvent[]) => void;
  onError?: (message: string) => void;
}

export class Poller {
  private cursor = 0;
  private inFlight = false;
  private timer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly client: ArenaClient,
    private readonly gameId: string,
    private readonly options: PollerOptions,
  ) {}

  get eventCursor(): number {
    return this.cursor;
  }

  start(): void {
    if (this.timer !== null) return;
    void this.tick();
    this.timer = setInterval(() => void this.tick(), this.options.intervalMs ?? 2000);
  }

  stop(): void {
    if (this.timer !== null) {
      clearInterval(this.timer);
      this.timer = null;
    }
  }

  /** One poll step; safe to call directly (submissions trigger it). */
  async tick(): Promise<void> {
    if (this.inFlight) return;
    this.inFlight = true;
    try {
      const events = await this.client.getEvents(this.gameId, this.cursor);
      const fresh = events.filter((e) => e.seq > this.cursor);
      if (fresh.length === 0) return;
      this.cursor = fresh[fresh.length - 1].seq;
      this.options.onEvents?.(fresh);
      const [game, board] = await Promise.all([
        this.client.getGame(this.gameId),
        this.client.getScoreboard(this.gameId),
      ]);
      this.options.onView(buildView(game, board, this.cursor));
    } catch (error) {
      this.options.onError?.(error instanceof Error ? error.message : String(error));
    } finally {
      this.inFlight = false;
    }
  }
}
