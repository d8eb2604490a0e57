import { ReviewApi } from "./api.js";
import { ClipPlayer } from "./player.js";
import { ReviewQueue } from "./queue.js";
import type { ReviewItem, Verdict } from "./types.js";

export type LoadState = "loading" | "ready" | "empty" | "error";

export interface ControllerEvents {
  onQueueChanged(): void;
  onLoadState(state: LoadState, detail?: string): void;
  onAudioError(clipId: string, message: string): void;
}

/** Glues the pure queue to the API and the player.
 *
 * Verdicts are never lost: each submission is staged locally first and
 * either acknowledged by the server (204) or kept in the visible retry
 * queue, which `flushRetries` drains on a timer.
 */
export class ReviewController {
  queue: ReviewQueue = new ReviewQueue([]);
  loadState: LoadState = "loading";

  constructor(
    private readonly api: ReviewApi,
    private readonly player: ClipPlayer,
    private readonly events: ControllerEvents,
  ) {}

  async load(): Promise<void> {
    this.loadState = "loading";
    this.events.onLoadState("loading");
    try {
      const rows = await this.api.fetchMisclassified();
      this.queue = ReviewQueue.fromServer(rows);
      this.loadState = rows.length ? "ready" : "empty";
      this.events.onLoadState(this.loadState);
      this.events.onQueueChanged();
    } catch (err) {
      this.loadState = "error";
      this.events.onLoadState("error", String(err));
    }
  }

  async play(item: ReviewItem): Promise<void> {
    try {
      await this.player.play(item.clipId, this.api.audioUrl(item));
      this.events.onQueueChanged();
    } catch (err) {
      this.events.onAudioError(item.clipId, String(err));
    }
  }

  get playingClipId(): string | null {
    return this.player.playingClipId;
  }

  /** Stage, try to sync, and move on to the next pending item either way. */
  async submit(item: ReviewItem, verdict: Verdict, note = ""): Promise<void> {
    this.queue.stage(item.clipId, verdict, note);
    this.events.onQueueChanged();
    try {
      await this.api.postVerdict(item.clipId, verdict, note);
      this.queue.markSynced(item.clipId);
    } catch {
      // stays in the retry queue; flushRetries will try again
    }
    this.queue.advance();
    this.events.onQueueChanged();
  }

  /** Re-send everything still awaiting a server ack. */
  async flushRetries(): Promise<number> {
    let synced = 0;
    for (const entry of this.queue.retryQueue) {
      try {
        await this.api.postVerdict(entry.clipId, entry.verdict, entry.note);
        this.queue.markSynced(entry.clipId);
        synced += 1;
      } catch {
        // keep waiting; the entry stays visible
      }
    }
    if (synced) this.events.onQueueChanged();
    return synced;
  }
}
