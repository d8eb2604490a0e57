import { describe, expect, it } from "vitest";

import { ReviewQueue } from "./queue.js";
import type { ServerItem } from "./types.js";

function serverRows(n = 3): ServerItem[] {
  return Array.from({ length: n }, (_, i) => ({
    clip_id: `clip_${i}`,
    true_label: i % 2,
    predicted: 1 - (i % 2),
    score: 0.9 - i * 0.1,
    audio_url: `/api/clip/clip_${i}/audio`,
  }));
}

describe("ReviewQueue.fromServer", () => {
  it("keeps the served (confidence-descending) order", () => {
    const queue = ReviewQueue.fromServer(serverRows(4));
    expect(queue.items.map((i) => i.clipId)).toEqual([
      "clip_0", "clip_1", "clip_2", "clip_3",
    ]);
    expect(queue.items.every((i) => i.verdictState === "pending")).toBe(true);
  });

  it("reconstructs verdict state from the API alone (reload survives)", () => {
    const rows = serverRows(3);
    rows[0].verdict = "confirm";
    rows[2].verdict = "relabel_negative";
    const queue = ReviewQueue.fromServer(rows);
    expect(queue.items[0].verdictState).toBe("confirmed");
    expect(queue.items[1].verdictState).toBe("pending");
    expect(queue.items[2].verdictState).toBe("relabeled");
    expect(queue.progress).toEqual({ reviewed: 2, total: 3 });
    expect(queue.current?.clipId).toBe("clip_1");
  });
});

describe("verdict transitions", () => {
  it("pending -> pending-sync -> confirmed", () => {
    const queue = ReviewQueue.fromServer(serverRows(2));
    queue.stage("clip_0", "confirm", "sounds normal");
    expect(queue.items[0].verdictState).toBe("pending-sync");
    expect(queue.retryQueue).toHaveLength(1);
    expect(queue.progress.reviewed).toBe(0); // not synced yet

    queue.markSynced("clip_0");
    expect(queue.items[0].verdictState).toBe("confirmed");
    expect(queue.retryQueue).toHaveLength(0);
    expect(queue.progress.reviewed).toBe(1);
  });

  it("relabel verdicts end in the relabeled state", () => {
    const queue = ReviewQueue.fromServer(serverRows(1));
    queue.stage("clip_0", "relabel_positive");
    queue.markSynced("clip_0");
    expect(queue.items[0].verdictState).toBe("relabeled");
    expect(queue.items[0].verdict).toBe("relabel_positive");
  });

  it("never re-reviews a settled item", () => {
    const queue = ReviewQueue.fromServer(serverRows(1));
    queue.stage("clip_0", "confirm");
    queue.markSynced("clip_0");
    expect(() => queue.stage("clip_0", "relabel_negative")).toThrow(/already reviewed/);
  });

  it("rejects unknown clips", () => {
    const queue = ReviewQueue.fromServer(serverRows(1));
    expect(() => queue.stage("ghost", "confirm")).toThrow(/unknown/);
  });
});

describe("cursor movement", () => {
  it("advance skips non-pending items and stops when done", () => {
    const queue = ReviewQueue.fromServer(serverRows(3));
    expect(queue.current?.clipId).toBe("clip_0");
    queue.stage("clip_0", "confirm");
    queue.markSynced("clip_0");
    expect(queue.advance()?.clipId).toBe("clip_1");
    queue.stage("clip_1", "confirm");
    queue.stage("clip_2", "confirm");
    queue.markSynced("clip_1");
    queue.markSynced("clip_2");
    expect(queue.advance()).toBeUndefined();
    expect(queue.done).toBe(true);
  });

  it("select moves the cursor to a clicked item", () => {
    const queue = ReviewQueue.fromServer(serverRows(3));
    expect(queue.select("clip_2")?.clipId).toBe("clip_2");
  });
});

describe("retry bookkeeping", () => {
  it("keeps unsynced verdicts visible until acknowledged", () => {
    const queue = ReviewQueue.fromServer(serverRows(3));
    queue.stage("clip_0", "relabel_negative", "wind noise");
    queue.stage("clip_1", "confirm");
    expect(queue.retryQueue.map((e) => e.clipId)).toEqual(["clip_0", "clip_1"]);
    queue.markSynced("clip_1");
    expect(queue.retryQueue.map((e) => e.clipId)).toEqual(["clip_0"]);
    expect(queue.retryQueue[0].note).toBe("wind noise");
  });
});
