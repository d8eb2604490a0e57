import type { Progress, ServerItem, Verdict } from "./types.js";

/** Thin client over the review REST endpoints. Throws on any non-success
 * response so callers can show retry states instead of silently showing
 * an empty queue. */
export class ReviewApi {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchFn: typeof fetch = (...args) => fetch(...args),
  ) {}

  async fetchMisclassified(): Promise<ServerItem[]> {
    const res = await this.fetchFn(`${this.baseUrl}/api/misclassified`);
    if (!res.ok) {
      throw new Error(`misclassified list failed: HTTP ${res.status}`);
    }
    const items = (await res.json()) as ServerItem[];
    if (!Array.isArray(items)) {
      throw new Error("misclassified list is not an array");
    }
    return items;
  }

  async postVerdict(clipId: string, verdict: Verdict, note: string): Promise<void> {
    const res = await this.fetchFn(`${this.baseUrl}/api/verdict`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ clip_id: clipId, verdict, note }),
    });
    if (res.status !== 204) {
      throw new Error(`verdict rejected: HTTP ${res.status}`);
    }
  }

  async fetchProgress(): Promise<Progress> {
    const res = await this.fetchFn(`${this.baseUrl}/api/progress`);
    if (!res.ok) {
      throw new Error(`progress failed: HTTP ${res.status}`);
    }
    return (await res.json()) as Progress;
  }

  audioUrl(item: { audioUrl: string }): string {
    return `${this.baseUrl}${item.audioUrl}`;
  }
}
