import type {
  PendingVerdict,
  ReviewItem,
  ServerItem,
  Verdict,
  VerdictState,
} from "./types.js";

function stateFor(verdict: Verdict | undefined): VerdictState {
  if (!verdict) return "pending";
  return verdict === "confirm" ? "confirmed" : "relabeled";
}

/** Pure review-session state: item order as served (confidence-descending),
 * verdict transitions, and the not-yet-synced retry queue. The server is
 * the source of truth; a reload rebuilds everything from the API list. */
export class ReviewQueue {
  readonly items: ReviewItem[];
  private cursor: number;
  private readonly pendingSync = new Map<string, PendingVerdict>();

  constructor(items: ReviewItem[]) {
    this.items = items;
    this.cursor = this.items.findIndex((i) => i.verdictState === "pending");
  }

  static fromServer(rows: ServerItem[]): ReviewQueue {
    return new ReviewQueue(
      rows.map((row) => ({
        clipId: row.clip_id,
        trueLabel: row.true_label,
        predicted: row.predicted,
        score: row.score,
        audioUrl: row.audio_url,
        verdict: row.verdict,
        verdictState: stateFor(row.verdict),
      })),
    );
  }

  get current(): ReviewItem | undefined {
    return this.cursor >= 0 ? this.items[this.cursor] : undefined;
  }

  get done(): boolean {
    return this.items.every((i) => i.verdictState !== "pending");
  }

  /** Synced verdicts only; matches the server's /api/progress after sync. */
  get progress(): { reviewed: number; total: number } {
    const reviewed = this.items.filter(
      (i) => i.verdictState === "confirmed" || i.verdictState === "relabeled",
    ).length;
    return { reviewed, total: this.items.length };
  }

  get retryQueue(): PendingVerdict[] {
    return [...this.pendingSync.values()];
  }

  find(clipId: string): ReviewItem | undefined {
    return this.items.find((i) => i.clipId === clipId);
  }

  /** Record a verdict locally; it stays pending-sync until the server acks. */
  stage(clipId: string, verdict: Verdict, note = ""): ReviewItem {
    const item = this.find(clipId);
    if (!item) throw new Error(`unknown clip ${clipId}`);
    if (item.verdictState === "confirmed" || item.verdictState === "relabeled") {
      throw new Error(`${clipId} already reviewed`);
    }
    item.verdict = verdict;
    item.note = note;
    item.verdictState = "pending-sync";
    this.pendingSync.set(clipId, { clipId, verdict, note });
    return item;
  }

  /** Server acknowledged (204): leave pending for good. */
  markSynced(clipId: string): ReviewItem {
    const item = this.find(clipId);
    if (!item || !item.verdict) throw new Error(`no staged verdict for ${clipId}`);
    item.verdictState = stateFor(item.verdict);
    this.pendingSync.delete(clipId);
    return item;
  }

  /** Move the cursor to the next item still awaiting a verdict. */
  advance(): ReviewItem | undefined {
    const start = this.cursor < 0 ? 0 : this.cursor;
    for (let step = 1; step <= this.items.length; step += 1) {
      const candidate = (start + step) % this.items.length;
      if (this.items[candidate].verdictState === "pending") {
        this.cursor = candidate;
        return this.items[candidate];
      }
    }
    this.cursor = -1;
    return undefined;
  }

  select(clipId: string): ReviewItem | undefined {
    const index = this.items.findIndex((i) => i.clipId === clipId);
    if (index >= 0) this.cursor = index;
    return this.current;
  }
}
